#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rawtypes/checker.h"
#include "rawtypes/interpreter.h"
#include "rawtypes/model.h"

namespace rawtypes {

struct GenBounds {
  int max_classes = 3;
  int max_methods_per_class = 3;  // constructors not counted
  int max_instrs_per_method = 8;
  int max_vars = 4;               // `this` and `arg` included
  int max_fields = 2;
  bool allow_casts = true;
  bool allow_handlers = true;

  // Empty iff the bounds are usable.
  std::vector<std::string> problems() const;
};

// Random structurally valid program, deterministic in (seed, bounds).
// Classes are C0..Cn (C0 the root), fields f0.., methods main, m1, m2..
// Throws std::invalid_argument for unusable bounds.
Program generate_program(std::uint64_t seed, const GenBounds& b);

// Exhaustive enumeration of small programs over the same naming scheme.
// Handler tables hold at most one entry, expressions read at most one
// field, and constructors return Init.
class ProgramEnumerator {
 public:
  static constexpr std::uint64_t kMaxPrograms = 1'000'000;

  explicit ProgramEnumerator(const GenBounds& b);
  ~ProgramEnumerator();

  // Size of the space; saturates far above kMaxPrograms.
  double estimate() const { return estimate_; }
  bool tractable() const { return estimate_ <= kMaxPrograms; }
  // Requires tractable().
  std::uint64_t count() const;
  Program at(std::uint64_t index) const;

  struct Skeleton;
  struct MethodSpace;

 private:
  GenBounds bounds_;
  std::vector<Skeleton> skeletons_;
  std::vector<double> prefix_;  // programs before each skeleton
  double estimate_ = 0;
};

// Visits every program in a stable order. Returns the number visited, or a
// refusal quoting the estimated size when it exceeds the cap. The visitor
// may return false to stop early.
Result<std::uint64_t> enumerate_small_programs(
    const GenBounds& b, const std::function<bool(const Program&)>& visit);

struct Counterexample {
  enum class Kind { kStuck, kIllFormed };

  Kind kind = Kind::kStuck;
  std::string message;
  std::vector<bool> branches;  // IfStar decisions leading to the violation
  MachineState state;          // the offending state
  std::string trace;           // replayed step trace
};

struct TrialOptions {
  std::int64_t path_cap = 1 << 12;
  // Forced prefix of IfStar decisions (replays a reported path).
  std::vector<bool> branches;
  bool merge_states = true;
};

struct TrialVerdict {
  std::string digest;
  Verdict typecheck = Verdict::kIllTyped;
  std::int64_t runs = 0;
  std::int64_t steps = 0;
  std::int64_t max_steps = 0;
  bool truncated = false;
  bool stuck_found = false;
  bool wf_violation_found = false;
  std::optional<Counterexample> counterexample;

  bool unsound() const { return stuck_found || wf_violation_found; }
};

// Stable hex digest of the program's canonical text.
std::string program_digest(const Program& p);

// Type-checks `p`; when accepted, explores it exhaustively and checks
// progress and well-formedness at every reached state.
TrialVerdict soundness_trial(const Program& p, std::int64_t fuel,
                             const TrialOptions& options = {});

// The exploration half of soundness_trial, against the given tables. Lets
// tests confirm that wrong tables are caught.
TrialVerdict explore_trial(const Program& p, const TypeTables& tables,
                           std::int64_t fuel,
                           const TrialOptions& options = {});

// One random structure-preserving edit, deterministic in (p, seed). Returns
// `p` unchanged when no valid mutant is found.
Program mutate(const Program& p, std::uint64_t seed);

struct FuzzOptions {
  GenBounds bounds;
  std::uint64_t seed = 0;
  std::int64_t trials = 1000;
  std::int64_t mutants = 0;  // drawn from the accepted programs
  std::int64_t fuel = 1000;
  std::int64_t path_cap = 1 << 12;
  std::vector<Program> extra_programs;  // also mutated, e.g. a corpus
  std::string counterexample_dir;       // empty: do not persist
};

struct FuzzFinding {
  std::string digest;
  std::string origin;  // "generated" or "mutant"
  std::string kind;    // "stuck" or "ill-formed"
  std::string message;
  std::string path;    // persisted .rt file, if any
};

struct FuzzSummary {
  std::int64_t programs = 0;
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
  std::int64_t mutants = 0;
  std::int64_t mutants_accepted = 0;
  std::int64_t mutants_rejected = 0;
  std::int64_t mutants_unchanged = 0;  // no valid edit was found
  std::int64_t paths = 0;
  std::int64_t steps = 0;
  std::int64_t truncated = 0;
  std::vector<FuzzFinding> counterexamples;
};

using FuzzProgress = std::function<void(const std::string& origin,
                                        std::int64_t index,
                                        const TrialVerdict&)>;

FuzzSummary run_fuzz(const FuzzOptions& options,
                     const FuzzProgress& progress = nullptr);

// Writes <dir>/<digest>.rt and <digest>.trace; returns the .rt path.
std::string write_counterexample(const std::string& dir, const Program& p,
                                 const Counterexample& c);

// Reads a .trace sidecar's branch line back.
std::vector<bool> parse_branches(const std::string& text);
std::string format_branches(const std::vector<bool>& branches);

}  // namespace rawtypes
