#pragma once

// Batch layer: curve-record ingestion, the parallel certification runner,
// report serialization (JSONL / TSV) and corpus summaries.
//
// Input schema, one JSON object per line:
//   {"label": str, "m0": int, "adelic_index": int?, "generators":
//    [[[int,int],[int,int]], ...]}
// Generator entries are reduced mod m0 and must be invertible.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ppcert/certifier.hpp"
#include "ppcert/errors.hpp"
#include "ppcert/grouptab.hpp"
#include "ppcert/primitive.hpp"

namespace ppcert {

struct CurveRecord {
  std::string label;
  uint32_t m0 = 1;
  std::optional<uint64_t> adelic_index;
  std::vector<Mat2> generators;
};

inline CurveRecord parse_curve_record(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("record is not a JSON object");
  for (const char* field : {"label", "m0", "generators"})
    if (!j.contains(field))
      throw ParseError(std::string("missing field: ") + field);
  if (!j["label"].is_string() || j["label"].get<std::string>().empty())
    throw ParseError("label must be a nonempty string");
  if (!j["m0"].is_number_integer() || j["m0"].get<int64_t>() < 1)
    throw ParseError("m0 must be a positive integer");
  int64_t m0_raw = j["m0"].get<int64_t>();
  if (m0_raw > Modulus::kMax)
    throw ParseError("m0 " + std::to_string(m0_raw) + " exceeds the " +
                     std::to_string(Modulus::kMax) + " ceiling");

  CurveRecord rec;
  rec.label = j["label"].get<std::string>();
  rec.m0 = uint32_t(m0_raw);
  if (j.contains("adelic_index") && !j["adelic_index"].is_null()) {
    if (!j["adelic_index"].is_number_integer() ||
        j["adelic_index"].get<int64_t>() < 1)
      throw ParseError("adelic_index must be a positive integer");
    rec.adelic_index = uint64_t(j["adelic_index"].get<int64_t>());
  }
  if (!j["generators"].is_array())
    throw ParseError("generators must be an array of 2x2 matrices");
  Modulus m(rec.m0);
  int64_t n = rec.m0;
  size_t idx = 0;
  for (const auto& gj : j["generators"]) {
    if (!gj.is_array() || gj.size() != 2 || !gj[0].is_array() ||
        !gj[1].is_array() || gj[0].size() != 2 || gj[1].size() != 2)
      throw ParseError("generator " + std::to_string(idx) +
                       " is not a 2x2 integer matrix");
    uint32_t e[4];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        if (!gj[r][c].is_number_integer())
          throw ParseError("generator " + std::to_string(idx) +
                           " has a non-integer entry");
        int64_t v = gj[r][c].get<int64_t>();
        e[2 * r + c] = uint32_t(((v % n) + n) % n);
      }
    Mat2 g(m, e[0], e[1], e[2], e[3]);
    if (!g.invertible())
      throw ParseError("generator " + std::to_string(idx) + " has det " +
                       std::to_string(g.det()) + ", not a unit mod " +
                       std::to_string(rec.m0));
    rec.generators.push_back(g);
    ++idx;
  }
  return rec;
}

struct ReportRecord {
  std::string label;
  std::string error;  // nonempty: the record failed, all else is defaulted
  std::string verdict;  // PASS | FAIL | ERROR
  std::string fail_stage;  // "" | LT | EF
  std::optional<LtWitness> lt_witness;
  std::optional<EfWitness> ef_witness;
  uint32_t m0 = 1;
  std::optional<uint64_t> adelic_index;
  uint32_t level_of_image = 1;
  std::vector<std::pair<uint32_t, uint64_t>> r_table;
  uint64_t primitive_count = 0;
  bool unique_direct = false;
  std::vector<uint64_t> primitive_degrees;
  uint64_t bound_crude = 0;
  std::optional<uint64_t> bound_index;
  double lt_ms = 0, ef_ms = 0, enumerate_ms = 0;
};

enum class ReportFormat { Jsonl, Tsv };

namespace detail {

inline double round_ms(double x) { return std::round(x * 1000.0) / 1000.0; }

inline std::string lt_witness_key(const LtWitness& w) {
  return "(" + std::to_string(w.ell) + "," + std::to_string(w.k) + ")";
}

inline std::string ef_witness_key(const EfWitness& w) {
  return "((" + std::to_string(w.a) + "," + std::to_string(w.b) + ")," +
         fiber_side_name(w.side) + ")";
}

}  // namespace detail

// Full pipeline for one record: certificate, direct oracle, primitive
// enumeration and bounds.
inline ReportRecord process_record(const CurveRecord& rec,
                                   LtMode mode = LtMode::TopOnly) {
  using clock = std::chrono::steady_clock;
  ReportRecord out;
  out.label = rec.label;
  out.m0 = rec.m0;
  out.adelic_index = rec.adelic_index;
  GroupTable g =
      GroupTable::close(SubgroupSpec{Modulus(rec.m0), rec.generators});
  Certificate cert = certify_unique(g, rec.m0, mode);
  out.verdict = verdict_name(cert.verdict);
  out.fail_stage = fail_stage_name(cert.fail_stage);
  out.lt_witness = cert.lt_witness;
  out.ef_witness = cert.ef_witness;
  out.lt_ms = detail::round_ms(cert.lt_ms);
  out.ef_ms = detail::round_ms(cert.ef_ms);
  out.unique_direct = unique_primitive_direct(g, rec.m0);
  auto t0 = clock::now();
  PrimitiveReport rep =
      enumerate_primitive_points(g, rec.m0, rec.adelic_index);
  out.enumerate_ms = detail::round_ms(
      std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  out.level_of_image = rep.bound.image_level.value_or(rec.m0);
  out.r_table = rep.r_table;
  out.primitive_count = rep.primitive_count;
  for (const PrimitivePoint& pp : rep.points)
    if (pp.primitive) out.primitive_degrees.push_back(pp.point.degree);
  out.bound_crude = rep.bound.crude;
  out.bound_index = rep.bound.index_bound;
  return out;
}

inline ReportRecord error_report(const std::string& label,
                                 const std::string& message) {
  ReportRecord out;
  out.label = label;
  out.error = message;
  out.verdict = "ERROR";
  return out;
}

namespace detail {

inline nlohmann::json report_to_json(const ReportRecord& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["verdict"] = r.verdict;
  j["fail_stage"] =
      r.fail_stage.empty() ? nlohmann::json() : nlohmann::json(r.fail_stage);
  if (r.lt_witness) {
    j["witness"] = {{"type", "LT"},
                    {"ell", r.lt_witness->ell},
                    {"k", r.lt_witness->k},
                    {"orbit", r.lt_witness->orbit_size},
                    {"expected", r.lt_witness->expected}};
  } else if (r.ef_witness) {
    j["witness"] = {
        {"type", "EF"},
        {"a", r.ef_witness->a},
        {"b", r.ef_witness->b},
        {"side", fiber_side_name(r.ef_witness->side)},
        {"orbit_rep",
         {r.ef_witness->orbit_rep.a, r.ef_witness->orbit_rep.b}}};
  } else {
    j["witness"] = nullptr;
  }
  j["m0"] = r.m0;
  j["adelic_index"] = r.adelic_index ? nlohmann::json(*r.adelic_index)
                                     : nlohmann::json();
  j["level_of_image"] = r.level_of_image;
  nlohmann::json rt = nlohmann::json::array();
  for (auto [n, rn] : r.r_table) rt.push_back({n, rn});
  j["r_table"] = rt;
  j["primitive_count"] = r.primitive_count;
  j["unique_direct"] = r.unique_direct;
  j["primitive_degrees"] = r.primitive_degrees;
  j["bounds"] = {{"crude", r.bound_crude},
                 {"index", r.bound_index ? nlohmann::json(*r.bound_index)
                                         : nlohmann::json()}};
  j["runtime_ms"] = {
      {"lt", r.lt_ms}, {"ef", r.ef_ms}, {"enumerate", r.enumerate_ms}};
  j["error"] = r.error.empty() ? nlohmann::json() : nlohmann::json(r.error);
  return j;
}

inline std::string witness_tsv(const ReportRecord& r) {
  if (r.lt_witness)
    return "LT:" + lt_witness_key(*r.lt_witness) +
           ":orb=" + std::to_string(r.lt_witness->orbit_size) +
           ":exp=" + std::to_string(r.lt_witness->expected);
  if (r.ef_witness)
    return "EF:" + ef_witness_key(*r.ef_witness) + ":rep=(" +
           std::to_string(r.ef_witness->orbit_rep.a) + "," +
           std::to_string(r.ef_witness->orbit_rep.b) + ")";
  return "-";
}

}  // namespace detail

// One line of output, no trailing newline.  TSV columns, in order:
// label verdict fail_stage witness m0 adelic_index level_of_image r_table
// primitive_count unique_direct primitive_degrees bound_crude bound_index
// lt_ms ef_ms enumerate_ms error  ("-" for empty optionals).
inline std::string emit_report(const ReportRecord& r, ReportFormat format) {
  if (format == ReportFormat::Jsonl) return detail::report_to_json(r).dump();
  std::ostringstream os;
  auto opt = [](const std::optional<uint64_t>& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  os << r.label << '\t' << r.verdict << '\t'
     << (r.fail_stage.empty() ? "-" : r.fail_stage) << '\t'
     << detail::witness_tsv(r) << '\t' << r.m0 << '\t' << opt(r.adelic_index)
     << '\t' << r.level_of_image << '\t';
  if (r.r_table.empty()) os << '-';
  for (size_t i = 0; i < r.r_table.size(); ++i)
    os << (i ? ";" : "") << r.r_table[i].first << ':' << r.r_table[i].second;
  os << '\t' << r.primitive_count << '\t' << (r.unique_direct ? 1 : 0) << '\t';
  if (r.primitive_degrees.empty()) os << '-';
  for (size_t i = 0; i < r.primitive_degrees.size(); ++i)
    os << (i ? ";" : "") << r.primitive_degrees[i];
  os << '\t' << r.bound_crude << '\t' << opt(r.bound_index) << '\t' << r.lt_ms
     << '\t' << r.ef_ms << '\t' << r.enumerate_ms << '\t'
     << (r.error.empty() ? "-" : r.error);
  return os.str();
}

// Inverse of the JSONL emission; used by round-trip checks and consumers.
inline ReportRecord parse_report_record(const std::string& line) try {
  nlohmann::json j = nlohmann::json::parse(line);
  ReportRecord r;
  r.label = j.at("label").get<std::string>();
  r.verdict = j.at("verdict").get<std::string>();
  if (!j.at("fail_stage").is_null())
    r.fail_stage = j["fail_stage"].get<std::string>();
  if (!j.at("witness").is_null()) {
    const auto& w = j["witness"];
    if (w.at("type") == "LT") {
      r.lt_witness = LtWitness{w.at("ell").get<uint32_t>(),
                               w.at("k").get<uint32_t>(),
                               w.at("orbit").get<uint64_t>(),
                               w.at("expected").get<uint64_t>()};
    } else {
      uint32_t a = w.at("a").get<uint32_t>();
      uint32_t b = w.at("b").get<uint32_t>();
      FiberSide side = w.at("side").get<std::string>() == "A" ? FiberSide::A
                                                              : FiberSide::B;
      r.ef_witness =
          EfWitness{a, b, side,
                    Vec2(Modulus(side == FiberSide::A ? a : b),
                         w.at("orbit_rep")[0].get<uint32_t>(),
                         w.at("orbit_rep")[1].get<uint32_t>())};
    }
  }
  r.m0 = j.at("m0").get<uint32_t>();
  if (!j.at("adelic_index").is_null())
    r.adelic_index = j["adelic_index"].get<uint64_t>();
  r.level_of_image = j.at("level_of_image").get<uint32_t>();
  for (const auto& e : j.at("r_table"))
    r.r_table.emplace_back(e[0].get<uint32_t>(), e[1].get<uint64_t>());
  r.primitive_count = j.at("primitive_count").get<uint64_t>();
  r.unique_direct = j.at("unique_direct").get<bool>();
  for (const auto& d : j.at("primitive_degrees"))
    r.primitive_degrees.push_back(d.get<uint64_t>());
  r.bound_crude = j.at("bounds").at("crude").get<uint64_t>();
  if (!j.at("bounds").at("index").is_null())
    r.bound_index = j["bounds"]["index"].get<uint64_t>();
  r.lt_ms = j.at("runtime_ms").at("lt").get<double>();
  r.ef_ms = j.at("runtime_ms").at("ef").get<double>();
  r.enumerate_ms = j.at("runtime_ms").at("enumerate").get<double>();
  if (!j.at("error").is_null()) r.error = j["error"].get<std::string>();
  return r;
} catch (const nlohmann::json::exception& e) {
  throw ParseError(std::string("malformed report JSON: ") + e.what());
}

struct BatchSummary {
  uint64_t total = 0;
  uint64_t errors = 0;
  uint64_t pass = 0;
  uint64_t unique = 0;
  uint64_t false_positives = 0;
  double pass_rate = 0;    // over non-error records
  double unique_rate = 0;  // over non-error records
  std::optional<double> recall;  // PASS share of the unique class
  std::map<std::string, uint64_t> lt_witnesses;
  std::map<std::string, uint64_t> ef_witnesses;
  double median_ms = 0, p90_ms = 0, p95_ms = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["total"] = total;
    j["errors"] = errors;
    j["pass"] = pass;
    j["unique"] = unique;
    j["false_positives"] = false_positives;
    j["pass_rate"] = pass_rate;
    j["unique_rate"] = unique_rate;
    j["recall"] = recall ? nlohmann::json(*recall) : nlohmann::json();
    j["lt_witnesses"] = lt_witnesses;
    j["ef_witnesses"] = ef_witnesses;
    j["runtime_ms"] = {
        {"median", median_ms}, {"p90", p90_ms}, {"p95", p95_ms}};
    return j;
  }
};

struct BatchOptions {
  unsigned jobs = 1;
  LtMode lt_mode = LtMode::TopOnly;
  ReportFormat format = ReportFormat::Jsonl;
  bool record_timings = true;  // false: zero out for byte-stable streams
};

namespace detail {

inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0;
  size_t rank = size_t(std::ceil(q * double(sorted.size())));
  if (rank == 0) rank = 1;
  return sorted[std::min(rank - 1, sorted.size() - 1)];
}

}  // namespace detail

// Runs every record through the pipeline with `jobs` workers and writes one
// report line per input line, in input order.  Per-record failures become
// ERROR reports; a PASS verdict on a record with more than one primitive
// point aborts the whole batch, since that breaks the certificate's
// soundness guarantee.
inline BatchSummary run_batch(std::istream& in, std::ostream& out,
                              const BatchOptions& opt = {}) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  std::vector<ReportRecord> reports(lines.size());

  unsigned jobs = std::max(1u, opt.jobs);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= lines.size()) return;
      try {
        reports[i] = process_record(parse_curve_record(lines[i]), opt.lt_mode);
      } catch (const Error& e) {
        // best effort at the label so the error line stays attributable
        std::string label = "<line " + std::to_string(i + 1) + ">";
        nlohmann::json probe =
            nlohmann::json::parse(lines[i], nullptr, false);
        if (probe.is_object() && probe.contains("label") &&
            probe["label"].is_string() &&
            !probe["label"].get<std::string>().empty())
          label = probe["label"].get<std::string>();
        reports[i] = error_report(label, e.what());
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // duplicate labels: keep the first, demote the rest to errors
  {
    std::map<std::string, size_t> seen;
    for (size_t i = 0; i < reports.size(); ++i) {
      if (!reports[i].error.empty()) continue;
      auto [it, fresh] = seen.emplace(reports[i].label, i);
      if (!fresh)
        reports[i] = error_report(
            reports[i].label,
            "duplicate label (first at line " +
                std::to_string(it->second + 1) + ")");
    }
  }

  BatchSummary s;
  std::vector<double> times;
  for (ReportRecord& r : reports) {
    if (!opt.record_timings) r.lt_ms = r.ef_ms = r.enumerate_ms = 0;
    out << emit_report(r, opt.format) << '\n';
    ++s.total;
    if (!r.error.empty()) {
      ++s.errors;
      continue;
    }
    times.push_back(r.lt_ms + r.ef_ms + r.enumerate_ms);
    bool passed = r.verdict == "PASS";
    bool is_unique = r.primitive_count == 1;
    if (passed) ++s.pass;
    if (is_unique) ++s.unique;
    if (passed && !is_unique) {
      ++s.false_positives;
      throw InternalInvariantError(
          "soundness breach: record " + r.label +
          " certified PASS with primitive_count " +
          std::to_string(r.primitive_count));
    }
    if (r.lt_witness) ++s.lt_witnesses[detail::lt_witness_key(*r.lt_witness)];
    if (r.ef_witness) ++s.ef_witnesses[detail::ef_witness_key(*r.ef_witness)];
  }
  uint64_t processed = s.total - s.errors;
  if (processed) {
    s.pass_rate = double(s.pass) / double(processed);
    s.unique_rate = double(s.unique) / double(processed);
  }
  if (s.unique) s.recall = double(s.pass) / double(s.unique);
  std::sort(times.begin(), times.end());
  s.median_ms = detail::quantile(times, 0.5);
  s.p90_ms = detail::quantile(times, 0.9);
  s.p95_ms = detail::quantile(times, 0.95);
  return s;
}

}  // namespace ppcert
