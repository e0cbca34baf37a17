// ppcert: certify uniqueness of the primitive point attached to a non-CM
// elliptic curve from generators of its mod-m0 Galois image.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppcert/ppcert.hpp"

namespace {

using namespace ppcert;

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;        // I/O or schema error
constexpr int kExitInvariant = 2; // internal invariant violation

std::vector<Mat2> parse_generators_arg(const std::string& json,
                                       uint32_t m0) {
  nlohmann::json wrapper;
  wrapper["label"] = "cli";
  wrapper["m0"] = m0;
  wrapper["generators"] = nlohmann::json::parse(json);
  return parse_curve_record(wrapper.dump()).generators;
}

int cmd_certify(const std::string& input, const std::string& output,
                const std::string& format, unsigned jobs,
                const std::string& lt_mode, bool no_timings) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "ppcert: cannot open input " << input << "\n";
    return kExitIo;
  }
  std::ofstream out(output);
  if (!out) {
    std::cerr << "ppcert: cannot open output " << output << "\n";
    return kExitIo;
  }
  BatchOptions opt;
  opt.jobs = jobs;
  opt.lt_mode = lt_mode == "all" ? LtMode::AllPowers : LtMode::TopOnly;
  opt.format = format == "tsv" ? ReportFormat::Tsv : ReportFormat::Jsonl;
  opt.record_timings = !no_timings;
  BatchSummary summary = run_batch(in, out, opt);
  std::cout << summary.to_json().dump() << "\n";
  return kExitOk;
}

int cmd_orbits(uint32_t m0, const std::string& gens_json) {
  GroupTable g = GroupTable::close(
      SubgroupSpec{Modulus(m0), parse_generators_arg(gens_json, m0)});
  GroupTable h = adjoin_neg_identity(g);
  std::cout << "m0=" << m0 << " |G|=" << g.order() << " |H|=" << h.order()
            << " index(H)=" << index_in_gl2(h)
            << " level=" << subgroup_level(g) << "\n";
  for (uint32_t n : Modulus(m0).divisors()) {
    GroupTable hn = adjoin_neg_identity(project(g, n));
    OrbitDecomposition od = orbit_decomposition(hn, n);
    std::cout << "n=" << n << " r=" << od.r() << ":";
    for (const Orbit& o : od.orbits)
      std::cout << " (rep=(" << o.representative.a << ","
                << o.representative.b << ") size=" << o.size
                << " deg=" << point_degree(o.size, n) << ")";
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_bounds(uint32_t m0, int64_t index) {
  std::optional<uint64_t> idx;
  if (index > 0) idx = uint64_t(index);
  BoundsRecord b = bounds(m0, idx);
  std::cout << b.m0 << " " << b.crude << " "
            << (b.index_bound ? std::to_string(*b.index_bound) : "-") << "\n";
  return kExitOk;
}

int cmd_enumerate(const std::string& input, const std::string& output) {
  std::ifstream in(input);
  if (!in) {
    std::cerr << "ppcert: cannot open input " << input << "\n";
    return kExitIo;
  }
  std::ofstream out(output);
  if (!out) {
    std::cerr << "ppcert: cannot open output " << output << "\n";
    return kExitIo;
  }
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      CurveRecord rec = parse_curve_record(line);
      GroupTable g =
          GroupTable::close(SubgroupSpec{Modulus(rec.m0), rec.generators});
      PrimitiveReport rep =
          enumerate_primitive_points(g, rec.m0, rec.adelic_index);
      j["label"] = rec.label;
      j["m0"] = rec.m0;
      j["primitive_count"] = rep.primitive_count;
      nlohmann::json pts = nlohmann::json::array();
      for (const PrimitivePoint& pp : rep.points)
        pts.push_back({{"level", pp.point.level},
                       {"rep", {pp.point.representative.a,
                                pp.point.representative.b}},
                       {"orbit_size", pp.point.orbit_size},
                       {"degree", pp.point.degree},
                       {"primitive", pp.primitive}});
      j["points"] = pts;
      nlohmann::json rt = nlohmann::json::array();
      for (auto [n, rn] : rep.r_table) rt.push_back({n, rn});
      j["r_table"] = rt;
      j["bounds"] = {{"crude", rep.bound.crude},
                     {"index", rep.bound.index_bound
                                   ? nlohmann::json(*rep.bound.index_bound)
                                   : nlohmann::json()}};
      j["error"] = nullptr;
    } catch (const Error& e) {
      j = {{"label", nullptr}, {"error", e.what()}};
    }
    out << j.dump() << "\n";
  }
  return kExitOk;
}

int cmd_oracle_suite(uint32_t max_n) {
  auto checks = run_oracle_suite(max_n);
  size_t passed = 0;
  std::printf("%-28s %-6s %s\n", "check", "result", "detail");
  for (const OracleCheck& c : checks) {
    std::printf("%-28s %-6s %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                c.detail.c_str());
    if (c.pass) ++passed;
  }
  std::printf("overall: %s (%zu/%zu)\n",
              passed == checks.size() ? "PASS" : "FAIL", passed,
              checks.size());
  return passed == checks.size() ? kExitOk : kExitInvariant;
}

int cmd_serre(uint32_t m0) {
  SerreCertificate s = serre_certificate(m0, 2);
  std::cout << "serre certificate: m0=" << s.m0
            << " adelic_index=" << s.adelic_index << "\n";
  if (s.applicable)
    std::cout << "commutator order=" << s.commutator_order
              << " orbit=" << s.orbit_size << " expected=" << s.expected
              << " transitive=" << (s.unique ? "yes" : "no") << "\n";
  std::cout << "verdict: " << s.message << "\n";
  return s.applicable && !s.unique ? kExitInvariant : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"primitive-point uniqueness certification"};
  app.require_subcommand(1);

  std::string input, output, format = "jsonl", lt_mode = "top", gens_json;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool no_timings = false;
  uint32_t m0 = 1, max_n = 30;
  int64_t index = 0;

  auto* certify = app.add_subcommand("certify", "run the batch certifier");
  certify->add_option("--input", input, "JSONL curve records")->required();
  certify->add_option("--output", output, "report stream")->required();
  certify->add_option("--format", format, "jsonl|tsv")
      ->check(CLI::IsMember({"jsonl", "tsv"}));
  certify->add_option("--jobs", jobs, "worker count");
  certify->add_option("--lt-mode", lt_mode, "top|all prime powers")
      ->check(CLI::IsMember({"top", "all"}));
  certify->add_flag("--no-timings", no_timings,
                    "zero runtime fields for byte-stable output");

  auto* orbits = app.add_subcommand("orbits", "orbit decompositions per level");
  orbits->add_option("--m0", m0, "level")->required();
  orbits->add_option("--gens", gens_json, "generator matrices as JSON")
      ->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "primitive-point bounds");
  bounds_cmd->add_option("--m0", m0, "level")->required();
  bounds_cmd->add_option("--index", index, "adelic index")
      ->check(CLI::PositiveNumber);

  auto* enumerate =
      app.add_subcommand("enumerate", "primitive-point enumeration");
  enumerate->add_option("--input", input, "JSONL curve records")->required();
  enumerate->add_option("--output", output, "report stream")->required();

  auto* oracle = app.add_subcommand("oracle-suite", "conformance checks");
  oracle->add_option("--max-n", max_n, "largest level for transitivity");

  auto* serre = app.add_subcommand("serre", "index-2 uniqueness witness");
  serre->add_option("--m0", m0, "level")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitIo;
  }

  try {
    if (certify->parsed())
      return cmd_certify(input, output, format, jobs, lt_mode, no_timings);
    if (orbits->parsed()) return cmd_orbits(m0, gens_json);
    if (bounds_cmd->parsed()) return cmd_bounds(m0, index);
    if (enumerate->parsed()) return cmd_enumerate(input, output);
    if (oracle->parsed()) return cmd_oracle_suite(max_n);
    if (serre->parsed()) return cmd_serre(m0);
  } catch (const ppcert::InternalInvariantError& e) {
    std::cerr << "ppcert: internal invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const ppcert::Error& e) {
    std::cerr << "ppcert: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "ppcert: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
