#include "rawtypes/harness.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rawtypes/parser.h"

namespace rawtypes {

std::string program_digest(const Program& p) {
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : pretty_print(p)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_branches(const std::vector<bool>& branches) {
  std::string out;
  for (bool b : branches) out += b ? '1' : '0';
  return out;
}

std::vector<bool> parse_branches(const std::string& text) {
  std::vector<bool> out;
  for (char c : text) {
    if (c == '0' || c == '1') out.push_back(c == '1');
  }
  return out;
}

TrialVerdict soundness_trial(const Program& p, std::int64_t fuel,
                             const TrialOptions& options) {
  CheckReport report = check_program(p);
  if (!report.well_typed()) {
    TrialVerdict v;
    v.digest = program_digest(p);
    v.typecheck = report.verdict;
    return v;
  }
  return explore_trial(p, report.tables, fuel, options);
}

TrialVerdict explore_trial(const Program& p, const TypeTables& tables,
                           std::int64_t fuel, const TrialOptions& options) {
  TrialVerdict v;
  v.digest = program_digest(p);
  v.typecheck = Verdict::kWellTyped;

  Machine machine(p);
  RunOptions run;
  run.policy = BranchPolicy::kExhaustive;
  run.path_cap = options.path_cap;
  run.forced_branches = options.branches;
  run.merge_states = options.merge_states;

  std::string why;
  WellFormedness wf(machine.hierarchy(), tables);
  auto observer = [&](const MachineState& s, const std::vector<bool>& path,
                      bool successor) {
    if (wf.check_along_path(s, successor, &why)) return true;
    v.wf_violation_found = true;
    Counterexample c;
    c.kind = Counterexample::Kind::kIllFormed;
    c.message = why;
    c.branches = path;
    c.state = s;
    v.counterexample = std::move(c);
    return false;
  };
  RunOutcome out = machine.run(fuel, run, observer);
  v.runs = out.paths;
  v.steps = out.steps;
  v.max_steps = out.max_depth;
  v.truncated = out.truncated;

  if (!v.counterexample && out.kind == RunOutcome::Kind::kStuck) {
    v.stuck_found = true;
    Counterexample c;
    c.kind = Counterexample::Kind::kStuck;
    c.message = describe(out);
    c.branches = out.branches;
    v.counterexample = std::move(c);
  }
  if (v.counterexample) {
    // Replay the offending path once more, with a trace.
    std::ostringstream trace;
    RunOptions replay;
    replay.forced_branches = v.counterexample->branches;
    replay.trace = &trace;
    MachineState last;
    machine.run(fuel, replay, [&](const MachineState& s, const auto&, bool) {
      last = s;
      return true;
    });
    if (v.stuck_found) v.counterexample->state = std::move(last);
    v.counterexample->trace = trace.str();
  }
  return v;
}

std::string write_counterexample(const std::string& dir, const Program& p,
                                 const Counterexample& c) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / program_digest(p)).string();
  std::ofstream(base + ".rt") << pretty_print(p);
  std::ofstream side(base + ".trace");
  side << "branches " << format_branches(c.branches) << "\n";
  side << "kind "
       << (c.kind == Counterexample::Kind::kStuck ? "stuck" : "ill-formed")
       << "\n";
  side << "message " << c.message << "\n";
  side << c.trace;
  return base + ".rt";
}

namespace {

void record(FuzzSummary& sum, const FuzzOptions& options, const Program& p,
            const TrialVerdict& v, const char* origin) {
  sum.paths += v.runs;
  sum.steps += v.steps;
  if (v.truncated) ++sum.truncated;
  if (!v.unsound()) return;
  FuzzFinding f;
  f.digest = v.digest;
  f.origin = origin;
  f.kind = v.stuck_found ? "stuck" : "ill-formed";
  f.message = v.counterexample->message;
  if (!options.counterexample_dir.empty()) {
    f.path = write_counterexample(options.counterexample_dir, p,
                                  *v.counterexample);
  }
  sum.counterexamples.push_back(std::move(f));
}

}  // namespace

FuzzSummary run_fuzz(const FuzzOptions& options,
                     const FuzzProgress& progress) {
  FuzzSummary sum;
  TrialOptions trial;
  trial.path_cap = options.path_cap;

  std::vector<Program> accepted = options.extra_programs;
  for (std::int64_t i = 0; i < options.trials; ++i) {
    Program p = generate_program(options.seed + static_cast<std::uint64_t>(i),
                                 options.bounds);
    TrialVerdict v = soundness_trial(p, options.fuel, trial);
    ++sum.programs;
    if (v.typecheck == Verdict::kWellTyped) {
      ++sum.accepted;
      accepted.push_back(p);
    } else {
      ++sum.rejected;
    }
    record(sum, options, p, v, "generated");
    if (progress) progress("generated", i, v);
  }

  if (accepted.empty()) return sum;
  for (std::int64_t i = 0; i < options.mutants; ++i) {
    const Program& base = accepted[static_cast<std::size_t>(i) % accepted.size()];
    Program m = mutate(base, options.seed * 0x9e3779b97f4a7c15ull +
                                 static_cast<std::uint64_t>(i));
    if (m == base) ++sum.mutants_unchanged;
    TrialVerdict v = soundness_trial(m, options.fuel, trial);
    ++sum.mutants;
    if (v.typecheck == Verdict::kWellTyped) {
      ++sum.mutants_accepted;
    } else {
      ++sum.mutants_rejected;
    }
    record(sum, options, m, v, "mutant");
    if (progress) progress("mutant", i, v);
  }
  return sum;
}

}  // namespace rawtypes
