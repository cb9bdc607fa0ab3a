#pragma once

// Shared fixtures: the running guarded-call example in both versions, plus
// helpers for invoking the CLI binary from tests.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "augfix/aug.hpp"
#include "augfix/aug_build.hpp"

namespace fixtures {

inline constexpr const char* kSampleMisuse = R"(void m() {
  pkg.A a = new pkg.A();
  pkg.B b = a.foo();
  b.bar();
}
)";

inline constexpr const char* kSampleFixed = R"(void m() {
  pkg.A a = new pkg.A();
  pkg.B b = a.foo();
  if (b.isBarable()) {
    b.bar();
  } else {
    b.bar2();
  }
}
)";

inline augfix::Aug sample_misuse() { return augfix::build_aug_from_source(kSampleMisuse); }
inline augfix::Aug sample_fixed() { return augfix::build_aug_from_source(kSampleFixed); }

inline std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "augfix-tests";
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path write_scratch(const std::string& name, const std::string& content) {
  auto path = scratch_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs the built CLI with stdout/stderr captured to scratch files.
inline CliResult run_cli(const std::string& args) {
  auto out_path = scratch_dir() / "cli.out";
  auto err_path = scratch_dir() / "cli.err";
  std::string command = std::string(AUGFIX_CLI_PATH) + " " + args + " > " + out_path.string() +
                        " 2> " + err_path.string();
  int status = std::system(command.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = read_all(out_path);
  result.err = read_all(err_path);
  return result;
}

}  // namespace fixtures
