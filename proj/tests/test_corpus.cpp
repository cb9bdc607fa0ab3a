#include <catch2/catch.hpp>
#include <filesystem>
#include <fstream>

#include "augfix/corpus.hpp"
#include "support/fixtures.hpp"

using namespace augfix;

namespace {

const std::filesystem::path kCorpusDir = AUGFIX_CORPUS_DIR;

std::filesystem::path make_case(const std::filesystem::path& root, const std::string& id,
                                const std::string& misuse, const std::string& fixed) {
  auto dir = root / id;
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "misuse.usage") << misuse;
  std::ofstream(dir / "fixed.usage") << fixed;
  return dir;
}

}  // namespace

TEST_CASE("the bundled corpus loads fifteen cases") {
  CorpusLoad load = load_corpus(kCorpusDir);
  CHECK(load.cases.size() == 15);
  CHECK(load.skipped.empty());
  for (const CorpusCase& c : load.cases) {
    CAPTURE(c.id);
    CHECK(validate(c.misuse_aug).empty());
    CHECK(validate(c.fixed_aug).empty());
    CHECK_FALSE(semantically_equal(c.misuse_aug, c.fixed_aug));
    CHECK_FALSE(c.description.empty());
  }
}

TEST_CASE("loading a missing directory fails") {
  CHECK_THROWS_AS(load_corpus(fixtures::scratch_dir() / "does-not-exist"), InputError);
}

TEST_CASE("an empty directory yields no cases") {
  auto dir = fixtures::scratch_dir() / "empty-corpus";
  std::filesystem::create_directories(dir);
  CorpusLoad load = load_corpus(dir);
  CHECK(load.cases.empty());
  CHECK(load.skipped.empty());
}

TEST_CASE("equal versions are skipped with a reason") {
  auto root = fixtures::scratch_dir() / "skip-corpus";
  std::filesystem::remove_all(root);
  make_case(root, "same", "void m() { A a = new A(); a.f(); }",
            "void m() { A a = new A(); a.f(); }");
  make_case(root, "broken", "void m() { b.f(); }", "void m() { }");
  CorpusLoad load = load_corpus(root);
  CHECK(load.cases.empty());
  REQUIRE(load.skipped.size() == 2);
  CHECK(load.skipped[0].id == "broken");
  CHECK(load.skipped[1].id == "same");
  CHECK(load.skipped[1].reason == "no change");
}

TEST_CASE("a single well-behaved case counts one across the board") {
  auto root = fixtures::scratch_dir() / "single-corpus";
  std::filesystem::remove_all(root);
  make_case(root, "one", "void m() { net.Conn c = new net.Conn(); c.send(); }",
            "void m() { net.Conn c = new net.Conn(); c.open(); c.send(); }");
  CorpusLoad load = load_corpus(root);
  REQUIRE(load.cases.size() == 1);

  EvalReport report = run_sanity(load.cases, {EvalMode::Rule});
  const ModeCounters& c = report.counters.at(EvalMode::Rule);
  CHECK(c.d == 1);
  CHECK(c.c == 1);
  CHECK(c.v == 1);
  CHECK(c.u == 1);
}

TEST_CASE("an empty case list reports zero counters") {
  EvalReport report = run_sanity({}, {EvalMode::Pattern, EvalMode::Rule});
  for (const auto& [mode, c] : report.counters) {
    CHECK(c.d == 0);
    CHECK(c.c == 0);
    CHECK(c.v == 0);
    CHECK(c.u == 0);
  }
  CHECK(render_report(report, ReportFormat::Table).find("0 (0.0%)") != std::string::npos);
}

TEST_CASE("the bundled corpus achieves the sanity-protocol targets") {
  CorpusLoad load = load_corpus(kCorpusDir);
  EvalReport report = run_sanity(load.cases, {EvalMode::Pattern, EvalMode::Rule});

  const ModeCounters& rule = report.counters.at(EvalMode::Rule);
  CHECK(rule.d == 15);
  CHECK(rule.c == 15);
  CHECK(rule.v == 15);
  CHECK(rule.u == 14);  // missing-call-01 and -03 are the same usage in disguise

  const ModeCounters& pattern = report.counters.at(EvalMode::Pattern);
  CHECK(pattern.d == 15);
  CHECK(pattern.c == 15);
  CHECK(pattern.v == 14);  // wrong-arg-02's stale key type lies outside the filter
  CHECK(pattern.u == 13);

  // Counter chain U <= V <= C <= D <= corpus size.
  for (const auto& [mode, c] : report.counters) {
    CHECK(c.u <= c.v);
    CHECK(c.v <= c.c);
    CHECK(c.c <= c.d);
    CHECK(c.d <= report.corpus_size);
  }
}

TEST_CASE("worker pools do not change the outcome") {
  CorpusLoad load = load_corpus(kCorpusDir);
  EvalReport serial = run_sanity(load.cases, {EvalMode::Rule});
  EvalReport parallel = run_sanity(load.cases, {EvalMode::Rule}, RepairOptions{}, 4);
  CHECK(serial.counters.at(EvalMode::Rule).d == parallel.counters.at(EvalMode::Rule).d);
  CHECK(serial.counters.at(EvalMode::Rule).c == parallel.counters.at(EvalMode::Rule).c);
  CHECK(serial.counters.at(EvalMode::Rule).v == parallel.counters.at(EvalMode::Rule).v);
  CHECK(serial.counters.at(EvalMode::Rule).u == parallel.counters.at(EvalMode::Rule).u);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i)
    CHECK(serial.rows[i].case_id == parallel.rows[i].case_id);
}

TEST_CASE("percentage cells render round-half-up to one decimal") {
  CHECK(format_cell(110, 116) == "110 (94.8%)");
  CHECK(format_cell(27, 116) == "27 (23.3%)");
  CHECK(format_cell(4, 116) == "4 (3.4%)");
  CHECK(format_cell(61, 116) == "61 (52.6%)");
  CHECK(format_cell(34, 116) == "34 (29.3%)");
  CHECK(format_cell(11, 116) == "11 (9.5%)");
  CHECK(format_cell(86, 116) == "86 (74.1%)");
  CHECK(format_cell(38, 116) == "38 (32.8%)");
  CHECK(format_cell(0, 116) == "0 (0.0%)");
  CHECK(format_cell(0, 0) == "0 (0.0%)");
  CHECK(format_cell(1, 200) == "1 (0.5%)");  // exact half rounds up
  CHECK(format_cell(1, 2000) == "1 (0.1%)");
}

TEST_CASE("report formats carry the counters") {
  CorpusLoad load = load_corpus(kCorpusDir);
  EvalReport report = run_sanity(load.cases, {EvalMode::Pattern, EvalMode::Rule});

  std::string table = render_report(report, ReportFormat::Table);
  CHECK(table.find("pattern-based") != std::string::npos);
  CHECK(table.find("rule-based") != std::string::npos);
  CHECK(table.find("15 (100.0%)") != std::string::npos);

  std::string csv = render_report(report, ReportFormat::Csv);
  CHECK(csv.rfind("mode,D,C,V,U,total\r\n", 0) == 0);
  CHECK(csv.find("rule-based,15,15,15,14,15\r\n") != std::string::npos);

  nlohmann::json j = nlohmann::json::parse(render_report(report, ReportFormat::Json));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["mode"] == "pattern-based");
  CHECK(j[1]["D"] == 15);
  CHECK(j[1]["cases"].size() == 15);
}
