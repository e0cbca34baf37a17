#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "ppcert/harness.hpp"
#include "test_support.hpp"

using namespace ppcert;

namespace {

std::string record_line(const std::string& label, uint32_t m0,
                        const std::vector<Mat2>& gens,
                        std::optional<uint64_t> index = {}) {
  nlohmann::json j;
  j["label"] = label;
  j["m0"] = m0;
  if (index) j["adelic_index"] = *index;
  nlohmann::json gj = nlohmann::json::array();
  for (const Mat2& g : gens)
    gj.push_back({{g.e[0], g.e[1]}, {g.e[2], g.e[3]}});
  j["generators"] = gj;
  return j.dump();
}

std::string full_image_line(const std::string& label, uint32_t m0) {
  return record_line(label, m0, gl2_generators(m0));
}

}  // namespace

TEST_CASE("parse_curve_record", "[harness]") {
  CurveRecord t1 = parse_curve_record(R"({"label":"t1","m0":1,"generators":[]})");
  REQUIRE(t1.label == "t1");
  REQUIRE(t1.m0 == 1);
  REQUIRE(t1.generators.empty());
  REQUIRE_FALSE(t1.adelic_index.has_value());

  CurveRecord t2 = parse_curve_record(
      R"({"label":"t2","m0":6,"generators":[[[1,1],[0,1]],[[0,1],[1,0]]]})");
  REQUIRE(t2.generators.size() == 2);
  REQUIRE(t2.generators[0] == Mat2(Modulus(6), 1, 1, 0, 1));

  // entries are reduced mod m0, negatives included
  CurveRecord t4 = parse_curve_record(
      R"({"label":"t4","m0":5,"generators":[[[-1,0],[0,6]]]})");
  REQUIRE(t4.generators[0] == Mat2(Modulus(5), 4, 0, 0, 1));

  REQUIRE_THROWS_MATCHES(
      parse_curve_record(
          R"({"label":"t3","m0":4,"generators":[[[2,0],[0,1]]]})"),
      ParseError,
      Catch::Matchers::Message(
          "generator 0 has det 2, not a unit mod 4"));

  REQUIRE_THROWS_AS(parse_curve_record("not json"), ParseError);
  REQUIRE_THROWS_AS(parse_curve_record(R"({"m0":4,"generators":[]})"),
                    ParseError);
  REQUIRE_THROWS_AS(
      parse_curve_record(R"({"label":"x","m0":0,"generators":[]})"),
      ParseError);
  REQUIRE_THROWS_AS(
      parse_curve_record(R"({"label":"","m0":2,"generators":[]})"),
      ParseError);
  REQUIRE_THROWS_AS(
      parse_curve_record(R"({"label":"x","m0":2,"generators":[[[1,0]]]})"),
      ParseError);
}

TEST_CASE("process_record on known images", "[harness]") {
  CurveRecord full = parse_curve_record(full_image_line("full12", 12));
  ReportRecord r = process_record(full);
  REQUIRE(r.verdict == "PASS");
  REQUIRE(r.fail_stage.empty());
  REQUIRE(r.primitive_count == 1);
  REQUIRE(r.unique_direct);
  REQUIRE(r.level_of_image == 1);
  REQUIRE(r.r_table ==
          std::vector<std::pair<uint32_t, uint64_t>>{
              {1, 1}, {2, 1}, {3, 1}, {4, 1}, {6, 1}, {12, 1}});

  ReportRecord borel = process_record(parse_curve_record(
      R"({"label":"borel3","m0":3,"generators":[[[1,1],[0,1]],[[2,0],[0,1]],[[1,0],[0,2]]]})"));
  REQUIRE(borel.verdict == "FAIL");
  REQUIRE(borel.fail_stage == "LT");
  REQUIRE(borel.lt_witness->ell == 3);
  REQUIRE(borel.lt_witness->k == 1);
  REQUIRE(borel.primitive_count == 3);
}

TEST_CASE("emit_report shapes", "[harness]") {
  ReportRecord pass = process_record(
      parse_curve_record(full_image_line("ok", 6)));
  std::string line = emit_report(pass, ReportFormat::Jsonl);
  REQUIRE(line.find("\"verdict\":\"PASS\"") != std::string::npos);
  REQUIRE(line.find("\"fail_stage\":null") != std::string::npos);

  ReportRecord lt = process_record(parse_curve_record(
      R"({"label":"lt","m0":3,"generators":[[[1,1],[0,1]],[[2,0],[0,1]],[[1,0],[0,2]]]})"));
  std::string lt_line = emit_report(lt, ReportFormat::Jsonl);
  REQUIRE(lt_line.find("\"type\":\"LT\"") != std::string::npos);
  REQUIRE(lt_line.find("\"ell\":3") != std::string::npos);
  REQUIRE(lt_line.find("\"k\":1") != std::string::npos);

  ReportRecord ef = process_record(parse_curve_record(
      record_line("ef", 6, ppsupport::psi_graph_generators())));
  std::string ef_line = emit_report(ef, ReportFormat::Jsonl);
  REQUIRE(ef_line.find("\"type\":\"EF\"") != std::string::npos);
  REQUIRE(ef_line.find("\"a\":2") != std::string::npos);
  REQUIRE(ef_line.find("\"b\":3") != std::string::npos);
  REQUIRE(ef_line.find("\"side\":\"A\"") != std::string::npos);

  std::string tsv = emit_report(ef, ReportFormat::Tsv);
  REQUIRE(tsv.find("EF:((2,3),A)") != std::string::npos);
  REQUIRE(std::count(tsv.begin(), tsv.end(), '\t') == 16);
}

TEST_CASE("jsonl report round-trips", "[harness]") {
  for (const std::string& line :
       {full_image_line("a", 8),
        record_line("b", 6, ppsupport::psi_graph_generators(), 6),
        std::string(
            R"({"label":"c","m0":3,"generators":[[[1,1],[0,1]],[[2,0],[0,1]],[[1,0],[0,2]]]})")}) {
    ReportRecord r = process_record(parse_curve_record(line));
    std::string once = emit_report(r, ReportFormat::Jsonl);
    std::string twice =
        emit_report(parse_report_record(once), ReportFormat::Jsonl);
    REQUIRE(once == twice);
  }
}

TEST_CASE("run_batch: order, errors, summary", "[harness]") {
  std::ostringstream input;
  input << full_image_line("full2", 2) << "\n";
  input << full_image_line("full3", 3) << "\n";
  input << "{broken\n";
  input << full_image_line("full4", 4) << "\n";
  input << R"({"label":"borel3","m0":3,"generators":[[[1,1],[0,1]],[[2,0],[0,1]],[[1,0],[0,2]]]})"
        << "\n";
  input << full_image_line("full2", 2) << "\n";  // duplicate label

  std::istringstream in(input.str());
  std::ostringstream out;
  BatchOptions opt;
  opt.record_timings = false;
  BatchSummary s = run_batch(in, out, opt);

  REQUIRE(s.total == 6);
  REQUIRE(s.errors == 2);
  REQUIRE(s.pass == 3);
  REQUIRE(s.unique == 3);
  REQUIRE(s.false_positives == 0);
  REQUIRE(s.lt_witnesses == std::map<std::string, uint64_t>{{"(3,1)", 1}});
  REQUIRE(s.ef_witnesses.empty());

  // one line per record, input order
  std::vector<std::string> lines;
  std::istringstream stream(out.str());
  for (std::string l; std::getline(stream, l);) lines.push_back(l);
  REQUIRE(lines.size() == 6);
  REQUIRE(parse_report_record(lines[0]).label == "full2");
  REQUIRE(parse_report_record(lines[1]).label == "full3");
  REQUIRE(parse_report_record(lines[2]).verdict == "ERROR");
  REQUIRE(parse_report_record(lines[4]).fail_stage == "LT");
  REQUIRE(parse_report_record(lines[5]).verdict == "ERROR");  // duplicate
}

TEST_CASE("run_batch: clean full-image batch", "[harness]") {
  std::ostringstream input;
  for (uint32_t m0 : {2u, 3u, 4u})
    input << full_image_line("full" + std::to_string(m0), m0) << "\n";
  std::istringstream in(input.str());
  std::ostringstream out;
  BatchSummary s = run_batch(in, out);
  REQUIRE(s.total == 3);
  REQUIRE(s.pass == 3);
  REQUIRE(s.unique == 3);
  REQUIRE(s.pass_rate == 1.0);
  REQUIRE(s.unique_rate == 1.0);
  REQUIRE(s.false_positives == 0);
}

TEST_CASE("run_batch determinism across worker counts", "[harness]") {
  std::ostringstream input;
  for (int i = 0; i < 12; ++i) {
    std::mt19937_64 rng(100 + i);
    uint32_t m0 = i % 2 ? 8 : 12;
    SubgroupSpec spec = ppsupport::random_subgroup_spec(rng, m0);
    input << record_line("r" + std::to_string(i), m0, spec.generators) << "\n";
  }
  input << record_line("ef", 6, ppsupport::psi_graph_generators()) << "\n";

  std::string expected;
  for (unsigned jobs : {1u, 4u, 7u}) {
    std::istringstream in(input.str());
    std::ostringstream out;
    BatchOptions opt;
    opt.jobs = jobs;
    opt.record_timings = false;
    run_batch(in, out, opt);
    if (expected.empty())
      expected = out.str();
    else
      REQUIRE(out.str() == expected);
  }
}

TEST_CASE("witness histogram matches hand counts", "[harness]") {
  std::ostringstream input;
  input << full_image_line("pass1", 2) << "\n";
  input << R"({"label":"ltA","m0":3,"generators":[[[1,1],[0,1]],[[2,0],[0,1]],[[1,0],[0,2]]]})"
        << "\n";
  input << R"({"label":"ltB","m0":3,"generators":[[[2,0],[0,2]]]})" << "\n";
  input << record_line("efA", 6, ppsupport::psi_graph_generators()) << "\n";

  std::istringstream in(input.str());
  std::ostringstream out;
  BatchOptions opt;
  opt.record_timings = false;
  BatchSummary s = run_batch(in, out, opt);
  REQUIRE(s.pass == 1);
  REQUIRE(s.unique == 2);  // pass1 and efA
  REQUIRE(s.lt_witnesses == std::map<std::string, uint64_t>{{"(3,1)", 2}});
  REQUIRE(s.ef_witnesses ==
          std::map<std::string, uint64_t>{{"((2,3),A)", 1}});
  REQUIRE(s.recall.has_value());
  REQUIRE(*s.recall == 0.5);
}
