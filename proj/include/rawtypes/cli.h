#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rawtypes/harness.h"
#include "rawtypes/interpreter.h"

namespace rawtypes::cli {

// Exit codes are a stable contract.
inline constexpr int kOk = 0;
inline constexpr int kIllTyped = 1;
inline constexpr int kParseError = 2;  // also bad command lines
inline constexpr int kIoError = 3;
inline constexpr int kStuck = 4;
inline constexpr int kFuelExhausted = 5;

enum class Format { kText, kMachine };

struct Streams {
  std::ostream& out;
  std::ostream& err;
};

int cmd_check(const std::vector<std::string>& paths, Format format,
              Streams io);

struct RunConfig {
  std::string path;
  std::int64_t fuel = 10000;
  std::uint64_t seed = 0;
  BranchPolicy policy = BranchPolicy::kSeeded;
  std::int64_t path_cap = 1 << 12;
  std::string branches;  // forced IfStar decisions, e.g. "0110"
  bool trace = false;    // per-step trace on the error stream
  Format format = Format::kText;
};

int cmd_run(const RunConfig& config, Streams io);

struct FuzzConfig {
  FuzzOptions options;
  std::vector<std::string> corpus;  // extra programs to mutate
  Format format = Format::kText;
  bool progress = false;  // per-trial lines on the error stream
};

int cmd_fuzz(const FuzzConfig& config, Streams io);

}  // namespace rawtypes::cli
