// Command-line front end for the AUG misuse detection and repair pipeline.
//
// Exit codes: 0 success / clean verdict, 1 misuse detected or repair
// produced, 2 usage error, 3 repair failure (timeout, no valid matching),
// 4 internal error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "augfix/aug.hpp"
#include "augfix/aug_build.hpp"
#include "augfix/corpus.hpp"
#include "augfix/cost.hpp"
#include "augfix/detect.hpp"
#include "augfix/dot.hpp"
#include "augfix/json_io.hpp"
#include "augfix/repair.hpp"
#include "augfix/usage_lang.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFinding = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRepairFailed = 3;
constexpr int kExitInternal = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw augfix::InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw augfix::InputError("cannot write " + path);
  out << content;
}

struct CommonArgs {
  bool ctor_actions = false;
  std::string dump_cost_matrix;
};

augfix::Aug load_usage(const std::string& path, const CommonArgs& common) {
  augfix::BuildOptions build;
  build.ctor_actions = common.ctor_actions;
  return augfix::build_aug_from_source(read_file(path), build);
}

void maybe_dump(const CommonArgs& common, const augfix::CostMatrix& matrix) {
  if (common.dump_cost_matrix.empty()) return;
  write_file(common.dump_cost_matrix, augfix::cost_matrix_csv(matrix));
}

struct TemplateArgs {
  std::string pattern_path;
  std::string rule_path;
};

void add_template_options(CLI::App* cmd, TemplateArgs& args) {
  auto* pattern = cmd->add_option("--pattern", args.pattern_path, "pattern AUG JSON file");
  auto* rule = cmd->add_option("--rule", args.rule_path, "change rule JSON file");
  pattern->excludes(rule);
  rule->excludes(pattern);
}

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_flag("--ctor-actions", args.ctor_actions,
                "emit an action node for constructor calls");
  cmd->add_option("--dump-cost-matrix", args.dump_cost_matrix,
                  "write the transform cost matrix as CSV to this path");
}

int run(int argc, char** argv) {
  CLI::App app{"API-usage-graph misuse detection and repair"};
  app.require_subcommand(1);

  // build-aug
  std::string build_input;
  bool out_dot = false, out_json = false;
  CommonArgs build_common;
  auto* cmd_build = app.add_subcommand("build-aug", "parse a .usage file and print its AUG");
  cmd_build->add_option("file", build_input, "usage-language source file")->required();
  auto* flag_dot = cmd_build->add_flag("--dot", out_dot, "emit Graphviz DOT");
  auto* flag_json = cmd_build->add_flag("--json", out_json, "emit JSON (default)");
  flag_dot->excludes(flag_json);
  flag_json->excludes(flag_dot);
  add_common_options(cmd_build, build_common);

  // detect
  std::string detect_input;
  TemplateArgs detect_template;
  CommonArgs detect_common;
  double overlap_threshold = 0.5;
  auto* cmd_detect = app.add_subcommand("detect", "detect a misuse via pattern or change rule");
  cmd_detect->add_option("file", detect_input, "usage-language source file")->required();
  add_template_options(cmd_detect, detect_template);
  cmd_detect->add_option("--overlap-threshold", overlap_threshold,
                         "minimum matched-label fraction for pattern violations")
      ->check(CLI::Range(0.0, 1.0));
  add_common_options(cmd_detect, detect_common);

  // extract-rule
  std::string extract_misuse, extract_fixed;
  CommonArgs extract_common;
  auto* cmd_extract = app.add_subcommand("extract-rule",
                                         "derive a change rule from a misuse/fixed pair");
  cmd_extract->add_option("misuse", extract_misuse, "misuse .usage file")->required();
  cmd_extract->add_option("fixed", extract_fixed, "fixed .usage file")->required();
  add_common_options(cmd_extract, extract_common);

  // repair
  std::string repair_input;
  TemplateArgs repair_template;
  CommonArgs repair_common;
  int max_retries = 10;
  double timeout_seconds = 300.0;
  bool detect_first = false;
  auto* cmd_repair = app.add_subcommand("repair", "repair a misuse via pattern or change rule");
  cmd_repair->add_option("file", repair_input, "misuse .usage file")->required();
  add_template_options(cmd_repair, repair_template);
  cmd_repair->add_option("--max-retries", max_retries, "ranked matchings to try")
      ->check(CLI::PositiveNumber);
  cmd_repair->add_option("--timeout", timeout_seconds, "seconds per repair (default 300)")
      ->check(CLI::PositiveNumber);
  cmd_repair->add_flag("--detect-first", detect_first,
                       "run detection first; clean usages report not_a_misuse");
  add_common_options(cmd_repair, repair_common);

  // compare
  std::string compare_a, compare_b;
  auto* cmd_compare = app.add_subcommand("compare", "semantic equality of two AUG JSON files");
  cmd_compare->add_option("a", compare_a, "first AUG JSON file")->required();
  cmd_compare->add_option("b", compare_b, "second AUG JSON file")->required();

  // eval
  std::string eval_dir, eval_mode = "both", eval_format = "table";
  int eval_workers = 1;
  int eval_retries = 10;
  double eval_timeout = 300.0;
  CommonArgs eval_common;
  auto* cmd_eval = app.add_subcommand("eval", "run the sanity protocol over a corpus directory");
  cmd_eval->add_option("dir", eval_dir, "corpus directory")->required();
  cmd_eval->add_option("--mode", eval_mode, "pattern, rule, or both (default)")
      ->check(CLI::IsMember({"pattern", "rule", "both"}));
  cmd_eval->add_option("--format", eval_format, "table, json, or csv")
      ->check(CLI::IsMember({"table", "json", "csv"}));
  cmd_eval->add_option("--workers", eval_workers, "concurrent cases")->check(CLI::PositiveNumber);
  cmd_eval->add_option("--max-retries", eval_retries, "ranked matchings per repair")
      ->check(CLI::PositiveNumber);
  cmd_eval->add_option("--timeout", eval_timeout, "seconds per repair (default 300)")
      ->check(CLI::PositiveNumber);
  add_common_options(cmd_eval, eval_common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (cmd_build->parsed()) {
    augfix::Aug aug = load_usage(build_input, build_common);
    std::cout << (out_dot ? augfix::to_dot(aug) : augfix::to_json_text(aug));
    return kExitOk;
  }

  if (cmd_detect->parsed()) {
    augfix::Aug usage = load_usage(detect_input, detect_common);
    augfix::Detection detection;
    if (!detect_template.rule_path.empty()) {
      augfix::ChangeRule rule = augfix::rule_from_json_text(read_file(detect_template.rule_path));
      maybe_dump(detect_common,
                 augfix::build_cost_matrix(augfix::strip_epsilon(rule.misuse_part), usage));
      detection = augfix::detect_with_rule(usage, rule);
    } else if (!detect_template.pattern_path.empty()) {
      augfix::Aug pattern = augfix::aug_from_json_text(read_file(detect_template.pattern_path));
      maybe_dump(detect_common,
                 augfix::build_cost_matrix(
                     augfix::filter_subgraph(usage, augfix::api_types_of(pattern)).sub, pattern));
      detection = augfix::detect_with_pattern(usage, pattern, overlap_threshold);
    } else {
      std::cerr << "detect: one of --pattern or --rule is required\n";
      return kExitUsage;
    }
    std::cout << augfix::to_json(detection).dump(2) << "\n";
    return detection.verdict == augfix::Verdict::Misuse ? kExitFinding : kExitOk;
  }

  if (cmd_extract->parsed()) {
    augfix::Aug misuse = load_usage(extract_misuse, extract_common);
    augfix::Aug fixed = load_usage(extract_fixed, extract_common);
    maybe_dump(extract_common, augfix::build_cost_matrix(misuse, fixed));
    augfix::ChangeRule rule = augfix::extract_change_rule(misuse, fixed);
    std::cout << augfix::to_json_text(rule);
    return kExitOk;
  }

  if (cmd_repair->parsed()) {
    augfix::Aug misuse = load_usage(repair_input, repair_common);
    augfix::RepairOptions opts;
    opts.max_retries = max_retries;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_seconds * 1000.0));
    opts.detect_first = detect_first;
    augfix::RepairOutcome outcome;
    if (!repair_template.rule_path.empty()) {
      augfix::ChangeRule rule = augfix::rule_from_json_text(read_file(repair_template.rule_path));
      maybe_dump(repair_common,
                 augfix::build_cost_matrix(misuse, augfix::strip_epsilon(rule.misuse_part)));
      outcome = augfix::rule_repair(misuse, rule, opts);
    } else if (!repair_template.pattern_path.empty()) {
      augfix::Aug pattern = augfix::aug_from_json_text(read_file(repair_template.pattern_path));
      maybe_dump(repair_common,
                 augfix::build_cost_matrix(
                     augfix::filter_subgraph(misuse, augfix::api_types_of(pattern)).sub, pattern));
      outcome = augfix::pattern_repair(misuse, pattern, opts);
    } else {
      std::cerr << "repair: one of --pattern or --rule is required\n";
      return kExitUsage;
    }
    for (const std::string& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << augfix::to_json(outcome).dump(2) << "\n";
    switch (outcome.status) {
      case augfix::RepairStatus::Repaired: return kExitFinding;
      case augfix::RepairStatus::NotAMisuse: return kExitOk;
      default:
        std::cerr << "repair failed: " << augfix::to_string(outcome.status) << " ("
                  << augfix::to_string(outcome.failure) << ")\n";
        return kExitRepairFailed;
    }
  }

  if (cmd_compare->parsed()) {
    augfix::Aug a = augfix::aug_from_json_text(read_file(compare_a));
    augfix::Aug b = augfix::aug_from_json_text(read_file(compare_b));
    bool equal = augfix::semantically_equal(a, b);
    std::cout << nlohmann::json{{"equal", equal}}.dump(2) << "\n";
    return equal ? kExitOk : kExitFinding;
  }

  if (cmd_eval->parsed()) {
    augfix::BuildOptions build;
    build.ctor_actions = eval_common.ctor_actions;
    augfix::CorpusLoad load = augfix::load_corpus(eval_dir, build);
    for (const augfix::SkippedCase& s : load.skipped)
      std::cerr << "skipped " << s.id << ": " << s.reason << "\n";
    std::vector<augfix::EvalMode> modes;
    if (eval_mode == "pattern" || eval_mode == "both") modes.push_back(augfix::EvalMode::Pattern);
    if (eval_mode == "rule" || eval_mode == "both") modes.push_back(augfix::EvalMode::Rule);
    augfix::RepairOptions opts;
    opts.max_retries = eval_retries;
    opts.timeout = std::chrono::milliseconds(static_cast<long long>(eval_timeout * 1000.0));
    augfix::EvalReport report = augfix::run_sanity(load.cases, modes, opts, eval_workers);
    augfix::ReportFormat format = eval_format == "json"  ? augfix::ReportFormat::Json
                                  : eval_format == "csv" ? augfix::ReportFormat::Csv
                                                         : augfix::ReportFormat::Table;
    std::cout << augfix::render_report(report, format);
    return kExitOk;
  }

  std::cerr << app.help();
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const augfix::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const augfix::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const augfix::BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
