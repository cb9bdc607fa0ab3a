#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "augfix/aug.hpp"
#include "augfix/aug_build.hpp"
#include "augfix/detect.hpp"
#include "augfix/repair.hpp"
#include "augfix/usage_lang.hpp"

namespace augfix {

// One (misuse, fixed) pair loaded from <dir>/<caseId>/{misuse,fixed}.usage.
struct CorpusCase {
  std::string id;
  std::string misuse_source;
  std::string fixed_source;
  std::string description;
  Aug misuse_aug;
  Aug fixed_aug;
};

struct SkippedCase {
  std::string id;
  std::string reason;
};

struct CorpusLoad {
  std::vector<CorpusCase> cases;
  std::vector<SkippedCase> skipped;
};

namespace corpus_detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace corpus_detail

// Cases that fail to parse, build an invalid graph, or show no change between
// the two versions are reported and skipped rather than failing the load.
inline CorpusLoad load_corpus(const std::filesystem::path& dir, const BuildOptions& build = {}) {
  if (!std::filesystem::is_directory(dir))
    throw InputError("corpus directory not found: " + dir.string());

  std::vector<std::filesystem::path> entries;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_directory()) entries.push_back(entry.path());
  std::sort(entries.begin(), entries.end());

  CorpusLoad out;
  std::map<std::string, bool> seen;
  for (const auto& case_dir : entries) {
    std::string id = case_dir.filename().string();
    std::string description;
    auto meta_path = case_dir / "meta.json";
    if (std::filesystem::exists(meta_path)) {
      try {
        auto meta = nlohmann::json::parse(corpus_detail::read_file(meta_path));
        if (meta.contains("id")) id = meta["id"].get<std::string>();
        if (meta.contains("description")) description = meta["description"].get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        out.skipped.push_back(SkippedCase{id, std::string("bad meta.json: ") + e.what()});
        continue;
      }
    }
    if (seen[id]) throw InputError("duplicate case id: " + id);
    seen[id] = true;

    CorpusCase c;
    c.id = id;
    c.description = description;
    try {
      c.misuse_source = corpus_detail::read_file(case_dir / "misuse.usage");
      c.fixed_source = corpus_detail::read_file(case_dir / "fixed.usage");
      c.misuse_aug = build_aug_from_source(c.misuse_source, build);
      c.fixed_aug = build_aug_from_source(c.fixed_source, build);
    } catch (const Error& e) {
      out.skipped.push_back(SkippedCase{id, e.what()});
      continue;
    }
    if (auto v = validate(c.misuse_aug); !v.empty()) {
      out.skipped.push_back(SkippedCase{id, "invalid misuse graph: " + v.front()});
      continue;
    }
    if (auto v = validate(c.fixed_aug); !v.empty()) {
      out.skipped.push_back(SkippedCase{id, "invalid fixed graph: " + v.front()});
      continue;
    }
    if (semantically_equal(c.misuse_aug, c.fixed_aug)) {
      out.skipped.push_back(SkippedCase{id, "no change"});
      continue;
    }
    out.cases.push_back(std::move(c));
  }
  return out;
}

enum class EvalMode { Pattern, Rule };

inline const char* to_string(EvalMode m) {
  return m == EvalMode::Pattern ? "pattern-based" : "rule-based";
}

struct CaseOutcome {
  std::string case_id;
  EvalMode mode = EvalMode::Pattern;
  bool generated = false;  // D: pattern graph / change rule constructed
  bool created = false;    // C: a repaired graph was produced
  bool valid = false;      // V: repaired graph semantically equals ground truth
  RepairStatus status = RepairStatus::NoValidMatching;
  FailureReason reason = FailureReason::None;
  int attempts = 0;
  double seconds = 0.0;
  std::optional<Aug> fix;
};

struct ModeCounters {
  int d = 0, c = 0, v = 0, u = 0;
};

struct EvalReport {
  int corpus_size = 0;
  std::map<EvalMode, ModeCounters> counters;
  std::vector<CaseOutcome> rows;
};

namespace corpus_detail {

inline CaseOutcome run_case(const CorpusCase& c, EvalMode mode, const RepairOptions& opts) {
  CaseOutcome row;
  row.case_id = c.id;
  row.mode = mode;
  auto started = std::chrono::steady_clock::now();

  RepairOutcome outcome;
  try {
    if (mode == EvalMode::Rule) {
      ChangeRule rule = extract_change_rule(c.misuse_aug, c.fixed_aug);
      row.generated = true;
      outcome = rule_repair(c.misuse_aug, rule, opts);
    } else {
      // Sanity protocol: the case's own fixed version serves as the pattern.
      row.generated = true;
      outcome = pattern_repair(c.misuse_aug, c.fixed_aug, opts);
    }
    row.status = outcome.status;
    row.reason = outcome.failure;
    row.attempts = outcome.attempts;
    if (outcome.status == RepairStatus::Repaired) {
      row.created = true;
      row.fix = std::move(outcome.repaired);
    }
  } catch (const Error&) {
    row.generated = false;
    row.reason = FailureReason::GenerationFailure;
  }
  if (row.created) {
    try {
      row.valid = semantically_equal(*row.fix, c.fixed_aug);
    } catch (const BudgetError&) {
      row.valid = false;  // inconclusive comparison counts as not validated
    }
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return row;
}

}  // namespace corpus_detail

// The sanity protocol: each case's own fix supplies the pattern and change
// rule, repair runs per mode, and D/C/V/U counters aggregate the outcomes.
// U deduplicates valid fixes by semantic equality of (misuse, fix) pairs.
inline EvalReport run_sanity(const std::vector<CorpusCase>& cases, std::vector<EvalMode> modes,
                             const RepairOptions& opts = {}, int workers = 1) {
  EvalReport report;
  report.corpus_size = static_cast<int>(cases.size());

  std::vector<std::pair<const CorpusCase*, EvalMode>> tasks;
  for (EvalMode mode : modes)
    for (const CorpusCase& c : cases) tasks.emplace_back(&c, mode);

  std::vector<CaseOutcome> rows(tasks.size());
  if (workers <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t)
      rows[t] = corpus_detail::run_case(*tasks[t].first, tasks[t].second, opts);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        std::size_t t = next.fetch_add(1);
        if (t >= tasks.size()) return;
        rows[t] = corpus_detail::run_case(*tasks[t].first, tasks[t].second, opts);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (EvalMode mode : modes) {
    ModeCounters& counters = report.counters[mode];
    std::vector<const CaseOutcome*> valid_rows;
    for (const CaseOutcome& row : rows) {
      if (row.mode != mode) continue;
      if (row.generated) ++counters.d;
      if (row.created) ++counters.c;
      if (row.valid) {
        ++counters.v;
        valid_rows.push_back(&row);
      }
    }
    // Unique fixes: equivalence classes of (misuse, fix) under semantic equality.
    std::vector<const CaseOutcome*> representatives;
    auto case_of = [&](const CaseOutcome* row) -> const CorpusCase& {
      for (const CorpusCase& c : cases)
        if (c.id == row->case_id) return c;
      throw Error("internal: unknown case id " + row->case_id);
    };
    for (const CaseOutcome* row : valid_rows) {
      bool duplicate = false;
      for (const CaseOutcome* rep : representatives) {
        if (semantically_equal(case_of(row).misuse_aug, case_of(rep).misuse_aug) &&
            semantically_equal(*row->fix, *rep->fix)) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) representatives.push_back(row);
    }
    counters.u = static_cast<int>(representatives.size());
  }

  report.rows = std::move(rows);
  std::stable_sort(report.rows.begin(), report.rows.end(),
                   [](const CaseOutcome& a, const CaseOutcome& b) {
                     if (a.mode != b.mode) return a.mode < b.mode;
                     return a.case_id < b.case_id;
                   });
  return report;
}

enum class ReportFormat { Table, Json, Csv };

// "110 (94.8%)" with the percentage of `total`, one decimal, round half up.
inline std::string format_cell(int count, int total) {
  long long tenths = total == 0 ? 0 : (static_cast<long long>(count) * 2000 + total) / (2LL * total);
  return std::to_string(count) + " (" + std::to_string(tenths / 10) + "." +
         std::to_string(tenths % 10) + "%)";
}

inline std::string render_report(const EvalReport& report, ReportFormat format) {
  std::vector<EvalMode> modes;
  for (const auto& [mode, counters] : report.counters) modes.push_back(mode);
  std::sort(modes.begin(), modes.end());  // pattern first, as in the result table

  if (format == ReportFormat::Csv) {
    std::string out = "mode,D,C,V,U,total\r\n";
    for (EvalMode mode : modes) {
      const ModeCounters& c = report.counters.at(mode);
      out += std::string(to_string(mode)) + "," + std::to_string(c.d) + "," + std::to_string(c.c) +
             "," + std::to_string(c.v) + "," + std::to_string(c.u) + "," +
             std::to_string(report.corpus_size) + "\r\n";
    }
    return out;
  }

  if (format == ReportFormat::Json) {
    nlohmann::json out = nlohmann::json::array();
    for (EvalMode mode : modes) {
      const ModeCounters& c = report.counters.at(mode);
      nlohmann::json cases = nlohmann::json::array();
      for (const CaseOutcome& row : report.rows) {
        if (row.mode != mode) continue;
        cases.push_back({{"case", row.case_id},
                         {"generated", row.generated},
                         {"created", row.created},
                         {"valid", row.valid},
                         {"status", to_string(row.status)},
                         {"reason", to_string(row.reason)},
                         {"attempts", row.attempts},
                         {"seconds", row.seconds}});
      }
      out.push_back({{"mode", to_string(mode)},
                     {"D", c.d},
                     {"C", c.c},
                     {"V", c.v},
                     {"U", c.u},
                     {"total", report.corpus_size},
                     {"cases", cases}});
    }
    return out.dump(2) + "\n";
  }

  // ASCII table shaped like the result summary: one row per mode, D/C/V/U
  // cells with percentages of corpus size.
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"", "D (%)", "C (%)", "V (%)", "U (%)"});
  for (EvalMode mode : modes) {
    const ModeCounters& c = report.counters.at(mode);
    grid.push_back({to_string(mode), format_cell(c.d, report.corpus_size),
                    format_cell(c.c, report.corpus_size), format_cell(c.v, report.corpus_size),
                    format_cell(c.u, report.corpus_size)});
  }
  std::vector<std::size_t> width(grid[0].size(), 0);
  for (const auto& row : grid)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());

  std::string out = "# repairing " + std::to_string(report.corpus_size) +
                    " misuses; U groups valid fixes by semantic equality of (misuse, fix)\n";
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += row[i];
      if (i + 1 < row.size()) out += std::string(width[i] - row[i].size() + 2, ' ');
    }
    out += "\n";
  }
  return out;
}

}  // namespace augfix
