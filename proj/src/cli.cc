#include "rawtypes/cli.h"

#include <fstream>
#include <iostream>
#include <sstream>

#include "rawtypes/parser.h"
#include "rawtypes/report.h"

namespace rawtypes::cli {

using nlohmann::json;

namespace {

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return false;
  text = ss.str();
  return true;
}

Diagnostic io_error(const std::string& path) {
  SourceLocation loc;
  loc.file = path;
  return make_error(codes::kIoError, "cannot read '" + path + "'", loc);
}

void print_text(std::ostream& os, const std::vector<Diagnostic>& ds) {
  for (const Diagnostic& d : ds) os << format_diagnostic(d) << "\n";
}

// Loads and parses; on failure records diagnostics and the exit code.
std::optional<Program> load(const std::string& path,
                            std::vector<Diagnostic>& diags, int& code) {
  std::string text;
  if (!read_file(path, text)) {
    diags.push_back(io_error(path));
    code = std::max(code, kIoError);
    return std::nullopt;
  }
  auto parsed = parse(text, path);
  if (!parsed) {
    diags.insert(diags.end(), parsed.diagnostics().begin(),
                 parsed.diagnostics().end());
    code = std::max(code, kParseError);
    return std::nullopt;
  }
  return std::move(*parsed);
}

const char* verdict_for(int code) {
  switch (code) {
    case kOk:
      return "well-typed";
    case kIllTyped:
      return "ill-typed";
    case kParseError:
      return "parse-error";
    default:
      return "io-error";
  }
}

}  // namespace

int cmd_check(const std::vector<std::string>& paths, Format format,
              Streams io) {
  int code = kOk;
  std::vector<Diagnostic> diags;
  json tables = json::object();
  std::vector<std::string> summary;

  for (const std::string& path : paths) {
    int file_code = kOk;
    auto p = load(path, diags, file_code);
    if (p) {
      CheckReport report = check_program(*p);
      diags.insert(diags.end(), report.diagnostics.begin(),
                   report.diagnostics.end());
      tables[path] = to_json(report.tables);
      if (!report.well_typed()) file_code = kIllTyped;
    }
    summary.push_back(path + ": " + verdict_for(file_code));
    code = std::max(code, file_code);
  }

  if (format == Format::kMachine) {
    json j = {{"verdict", verdict_for(code)},
              {"diagnostics", to_json(diags)},
              {"tables", std::move(tables)}};
    io.out << j.dump(2) << "\n";
  } else {
    print_text(io.out, diags);
    for (const std::string& line : summary) io.out << line << "\n";
  }
  return code;
}

int cmd_run(const RunConfig& config, Streams io) {
  int code = kOk;
  std::vector<Diagnostic> diags;
  auto p = load(config.path, diags, code);
  if (!p) {
    if (config.format == Format::kMachine) {
      json j = {{"verdict", verdict_for(code)},
                {"diagnostics", to_json(diags)}};
      io.out << j.dump(2) << "\n";
    } else {
      print_text(io.err, diags);
    }
    return code;
  }

  RunOptions options;
  options.policy = config.policy;
  options.seed = config.seed;
  options.path_cap = config.path_cap;
  options.forced_branches = parse_branches(config.branches);
  if (config.trace) options.trace = &io.err;
  RunOutcome out = Machine(*p).run(config.fuel, options);

  switch (out.kind) {
    case RunOutcome::Kind::kFinal:
    case RunOutcome::Kind::kFinalExceptional:
      code = kOk;
      break;
    case RunOutcome::Kind::kStuck:
      code = kStuck;
      break;
    case RunOutcome::Kind::kFuelExhausted:
      code = kFuelExhausted;
      break;
  }

  if (config.format == Format::kMachine) {
    json j = {{"verdict", to_string(out.kind)},
              {"diagnostics", json::array()},
              {"outcome", to_json(out)}};
    io.out << j.dump(2) << "\n";
  } else {
    io.out << describe(out) << "\n";
    io.out << "paths " << out.paths << " steps " << out.steps;
    if (!out.branches.empty()) {
      io.out << " branches " << format_branches(out.branches);
    }
    if (out.truncated) io.out << " (path cap reached)";
    io.out << "\n";
  }
  return code;
}

int cmd_fuzz(const FuzzConfig& config, Streams io) {
  FuzzOptions options = config.options;
  std::vector<Diagnostic> diags;
  int code = kOk;
  for (const std::string& path : config.corpus) {
    auto p = load(path, diags, code);
    if (p && check_program(*p).well_typed()) {
      options.extra_programs.push_back(std::move(*p));
    }
  }
  if (code != kOk) {
    print_text(io.err, diags);
    return code;
  }
  auto problems = options.bounds.problems();
  if (!problems.empty()) {
    for (const std::string& msg : problems) {
      io.err << codes::kInvalidBounds << " " << msg << "\n";
    }
    return kParseError;
  }

  FuzzProgress progress;
  if (config.progress) {
    progress = [&io](const std::string& origin, std::int64_t i,
                     const TrialVerdict& v) {
      io.err << origin << " " << i << " " << v.digest << " "
             << to_string(v.typecheck) << " paths " << v.runs << " steps "
             << v.steps << (v.unsound() ? " UNSOUND" : "") << "\n";
    };
  }
  FuzzSummary sum = run_fuzz(options, progress);
  const bool sound = sum.counterexamples.empty();

  if (config.format == Format::kMachine) {
    json j = {{"verdict", sound ? "sound" : "unsound"},
              {"diagnostics", json::array()},
              {"trials", to_json(sum)}};
    io.out << j.dump(2) << "\n";
  } else {
    io.out << "programs " << sum.programs << " accepted " << sum.accepted
           << " rejected " << sum.rejected << "\n";
    io.out << "mutants " << sum.mutants << " accepted "
           << sum.mutants_accepted << " rejected " << sum.mutants_rejected
           << " unchanged " << sum.mutants_unchanged << "\n";
    io.out << "paths " << sum.paths << " steps " << sum.steps
           << " truncated " << sum.truncated << "\n";
    io.out << "counterexamples " << sum.counterexamples.size() << "\n";
    for (const FuzzFinding& f : sum.counterexamples) {
      io.out << "  " << f.origin << " " << f.digest << " " << f.kind << ": "
             << f.message;
      if (!f.path.empty()) io.out << " (" << f.path << ")";
      io.out << "\n";
    }
  }
  return sound ? kOk : kIllTyped;
}

}  // namespace rawtypes::cli
