#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rawtypes/cli.h"
#include "support.h"

using namespace rawtypes;
using nlohmann::json;

namespace {

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured check(std::vector<std::string> paths,
               cli::Format f = cli::Format::kText) {
  std::ostringstream out, err;
  int code = cli::cmd_check(paths, f, {out, err});
  return {code, out.str(), err.str()};
}

Captured run(cli::RunConfig c) {
  std::ostringstream out, err;
  int code = cli::cmd_run(c, {out, err});
  return {code, out.str(), err.str()};
}

Captured fuzz(cli::FuzzConfig c) {
  std::ostringstream out, err;
  int code = cli::cmd_fuzz(c, {out, err});
  return {code, out.str(), err.str()};
}

std::string corpus(const char* name) { return rtest::corpus_path(name); }

int shell(const std::string& args) {
  std::string cmd = std::string(RAWTYPES_BIN) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(check({corpus("classloader.rt")}).code == cli::kOk);
  CHECK(check({corpus("ex1_raw.rt")}).code == cli::kOk);
  CHECK(check({corpus("ex1_init.rt")}).code == cli::kIllTyped);
  CHECK(check({"/no/such/file.rt"}).code == cli::kIoError);

  Captured a = check({corpus("classloader_attack.rt")});
  CHECK(a.code == cli::kIllTyped);
  std::string text = rtest::read_file(corpus("classloader_attack.rt"));
  int line = rtest::line_of(text, "r <- this.ClassLoader::resolveClass(k)");
  std::string where = corpus("classloader_attack.rt") + ":" +
                      std::to_string(line) + ":5 call-pre-violation-static";
  CHECK(a.out.find(where) != std::string::npos);
  CHECK(a.out.find("ill-typed") != std::string::npos);

  // The worst file decides.
  CHECK(check({corpus("classloader.rt"), corpus("ex1_init.rt")}).code ==
        cli::kIllTyped);
}

TEST_CASE("check reports parse errors with exit 2") {
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() / "rawtypes_cli_bad.rt";
  {
    std::ofstream(p) << "class C {";
  }
  Captured c = check({p.string()});
  CHECK(c.code == cli::kParseError);
  CHECK(c.out.find("syntax-error") != std::string::npos);
  {
    std::ofstream(p) << "class C { init() { 0: return this; } "
                        "method main() { 0: if * jmp 0; } } main C;";
  }
  CHECK(check({p.string()}).code == cli::kParseError);
  fs::remove(p);
}

TEST_CASE("machine check report") {
  Captured c = check({corpus("ex1_init.rt")}, cli::Format::kMachine);
  json j = json::parse(c.out);
  CHECK(j["verdict"] == "ill-typed");
  REQUIRE(j["diagnostics"].is_array());
  bool found = false;
  for (const auto& d : j["diagnostics"]) {
    CHECK(d.contains("severity"));
    CHECK(d.contains("code"));
    CHECK(d.contains("message"));
    CHECK(d.contains("file"));
    CHECK(d.contains("line"));
    CHECK(d.contains("column"));
    if (d["code"] == "call-pre-violation-static") {
      found = true;
      CHECK(d["class"] == "Ex1B");
      CHECK(d["method"] == "init");
      CHECK(d["pc"] == 1);
    }
  }
  CHECK(found);
  CHECK(j.contains("tables"));

  Captured ok = check({corpus("ex1_raw.rt")}, cli::Format::kMachine);
  json k = json::parse(ok.out);
  CHECK(k["verdict"] == "well-typed");
  const std::string file = corpus("ex1_raw.rt");
  CHECK(k["tables"][file].contains("Ex1A.getF"));
  CHECK(k["tables"][file]["Ex1A.getF"][0]["this"] == "Raw(Ex1A)");
  // Deterministic.
  CHECK(check({corpus("ex1_raw.rt")}, cli::Format::kMachine).out == ok.out);
}

TEST_CASE("run exit codes") {
  cli::RunConfig c;
  c.path = corpus("classloader.rt");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    CHECK(run(c).code == cli::kOk);
  }
  c.policy = BranchPolicy::kExhaustive;
  CHECK(run(c).code == cli::kOk);

  c.path = corpus("classloader_attack.rt");
  Captured a = run(c);
  CHECK(a.code == cli::kStuck);
  CHECK(a.out.find("call-pre-violation") != std::string::npos);

  c.path = corpus("setinit.rt");
  c.fuel = 0;
  CHECK(run(c).code == cli::kFuelExhausted);

  c.path = "/no/such/file.rt";
  CHECK(run(c).code == cli::kIoError);
}

TEST_CASE("run replays forced branches and traces") {
  cli::RunConfig c;
  c.path = corpus("setinit.rt");
  c.branches = "1";
  c.trace = true;
  Captured r = run(c);
  CHECK(r.code == cli::kOk);
  CHECK(r.err.find("step 0: Main.main pc 0") != std::string::npos);
  CHECK(r.err.find("raise np") != std::string::npos);

  c.trace = false;
  c.format = cli::Format::kMachine;
  json j = json::parse(run(c).out);
  CHECK(j.contains("verdict"));
  CHECK(j.contains("diagnostics"));
  CHECK(j["outcome"]["kind"] == "Final");
}

TEST_CASE("fuzz") {
  cli::FuzzConfig z;
  z.options.trials = 0;
  Captured e = fuzz(z);
  CHECK(e.code == cli::kOk);

  cli::FuzzConfig c;
  c.options.trials = 100;
  c.options.mutants = 100;
  c.options.seed = 5;
  c.corpus = {corpus("classloader.rt"), corpus("classloader_attack.rt")};
  c.format = cli::Format::kMachine;
  Captured a = fuzz(c), b = fuzz(c);
  CHECK(a.code == cli::kOk);
  CHECK(a.out == b.out);
  json j = json::parse(a.out);
  CHECK(j["verdict"] == "sound");
  CHECK(j["diagnostics"].empty());
  CHECK(j["trials"]["programs"] == 100);
  CHECK(j["trials"]["mutants"] == 100);
  CHECK(j["trials"]["counterexamples"].empty());
}

TEST_CASE("binary exit codes") {
  CHECK(shell("check " + corpus("classloader.rt")) == 0);
  CHECK(shell("check " + corpus("classloader_attack.rt")) == 1);
  CHECK(shell("check /no/such/file.rt") == 3);
  CHECK(shell("run --exhaustive " + corpus("classloader_attack.rt")) == 4);
  CHECK(shell("run --fuel 0 " + corpus("setinit.rt")) == 5);
  CHECK(shell("run --seed 3 " + corpus("ex1_raw.rt")) == 0);
  CHECK(shell("fuzz --trials 0") == 0);
  CHECK(shell("fuzz --trials 20 --seed 1 --format machine") == 0);
  CHECK(shell("bogus") == 2);
  CHECK(shell("check --format nope " + corpus("ex1_raw.rt")) == 2);
}
