// rawtypes: check, run and fuzz programs of the initialization-typed
// mini-language.

#include <iostream>

#include "CLI11.hpp"
#include "rawtypes/cli.h"

namespace cli = rawtypes::cli;

int main(int argc, char** argv) {
  CLI::App app{"Object initialization types: checker, interpreter, fuzzer"};
  app.require_subcommand(1);

  std::string format = "text";
  auto add_format = [&format](CLI::App* sub) {
    sub->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"text", "machine"}));
  };
  auto parsed_format = [&format] {
    return format == "machine" ? cli::Format::kMachine : cli::Format::kText;
  };

  // check
  std::vector<std::string> check_paths;
  CLI::App* check = app.add_subcommand("check", "Type-check .rt files");
  check->add_option("paths", check_paths, "Input files")->required();
  add_format(check);

  // run
  cli::RunConfig run_cfg;
  bool exhaustive = false;
  CLI::App* run = app.add_subcommand("run", "Execute a .rt file");
  run->add_option("path", run_cfg.path, "Input file")->required();
  run->add_option("--fuel", run_cfg.fuel, "Step budget per path")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  run->add_option("--seed", run_cfg.seed, "Seed for `if *` choices")
      ->capture_default_str();
  run->add_flag("--exhaustive", exhaustive,
                "Explore every `if *` choice and report the worst outcome");
  run->add_option("--path-cap", run_cfg.path_cap,
                  "Paths explored in exhaustive mode")
      ->capture_default_str();
  run->add_option("--branches", run_cfg.branches,
                  "Forced `if *` decisions, e.g. 0110 (1 = jump)");
  run->add_flag("--trace", run_cfg.trace, "Print one line per step to stderr");
  add_format(run);

  // fuzz
  cli::FuzzConfig fuzz_cfg;
  fuzz_cfg.options.fuel = 10000;
  std::int64_t mutants = -1;
  bool no_casts = false;
  bool no_handlers = false;
  auto& b = fuzz_cfg.options.bounds;
  CLI::App* fuzz =
      app.add_subcommand("fuzz", "Check soundness on generated programs");
  fuzz->add_option("--trials", fuzz_cfg.options.trials, "Generated programs")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  fuzz->add_option("--mutants", mutants,
                   "Mutants of accepted programs (default: same as trials)")
      ->check(CLI::NonNegativeNumber);
  fuzz->add_option("--seed", fuzz_cfg.options.seed, "First seed")
      ->capture_default_str();
  fuzz->add_option("--fuel", fuzz_cfg.options.fuel, "Step budget per path")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  fuzz->add_option("--path-cap", fuzz_cfg.options.path_cap,
                   "Paths explored per program")
      ->capture_default_str();
  fuzz->add_option("--max-classes", b.max_classes)->capture_default_str();
  fuzz->add_option("--max-methods", b.max_methods_per_class,
                   "Methods per class, constructors excluded")
      ->capture_default_str();
  fuzz->add_option("--max-instrs", b.max_instrs_per_method)
      ->capture_default_str();
  fuzz->add_option("--max-vars", b.max_vars, "Variables, this and arg included")
      ->capture_default_str();
  fuzz->add_option("--max-fields", b.max_fields)->capture_default_str();
  fuzz->add_flag("--no-casts", no_casts, "Generate no casts");
  fuzz->add_flag("--no-handlers", no_handlers, "Generate no handlers");
  fuzz->add_option("--corpus", fuzz_cfg.corpus,
                   "Well-typed .rt files to mutate as well");
  fuzz->add_option("--counterexamples", fuzz_cfg.options.counterexample_dir,
                   "Directory receiving counterexample .rt and .trace files");
  fuzz->add_flag("--progress", fuzz_cfg.progress,
                 "Print one line per trial to stderr");
  add_format(fuzz);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kParseError;
  }

  cli::Streams io{std::cout, std::cerr};
  try {
    if (check->parsed()) {
      return cli::cmd_check(check_paths, parsed_format(), io);
    }
    if (run->parsed()) {
      run_cfg.policy = exhaustive ? rawtypes::BranchPolicy::kExhaustive
                                  : rawtypes::BranchPolicy::kSeeded;
      run_cfg.format = parsed_format();
      return cli::cmd_run(run_cfg, io);
    }
    b.allow_casts = !no_casts;
    b.allow_handlers = !no_handlers;
    fuzz_cfg.options.mutants =
        mutants >= 0 ? mutants : fuzz_cfg.options.trials;
    fuzz_cfg.format = parsed_format();
    return cli::cmd_fuzz(fuzz_cfg, io);
  } catch (const std::exception& e) {
    std::cerr << "rawtypes: " << e.what() << "\n";
    return cli::kIoError;
  }
}
