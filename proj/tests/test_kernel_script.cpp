#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tandem/script.hpp"

using namespace tandem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kGolden[] = {
    "call_errors",  "env_isolation",     "ivar_views",
    "mixin_include", "person_primitives", "person_ruby",
    "person_wrapped", "singleton_levels", "wide_calls",
};

}  // namespace

TEST_CASE("golden scripts reproduce their frozen transcripts") {
  for (const char* name : kGolden) {
    CAPTURE(name);
    std::string base = std::string(GOLDEN_DIR) + "/" + name;
    std::string script = slurp(base + ".ts");
    std::string want = slurp(base + ".expected");

    ScriptResult first = ScriptRunner().run(script);
    CHECK(first.exit_code == 0);
    CHECK(first.transcript == want);

    // Same text, fresh runtime: the transcript is deterministic.
    ScriptResult second = ScriptRunner().run(script);
    CHECK(second.transcript == first.transcript);
    CHECK(second.exit_code == first.exit_code);
  }
}

TEST_CASE("failed expectations exit 1") {
  ScriptResult r = ScriptRunner().run(
      "env ruby\n"
      "send 1 + 1\n"
      "expect 3\n");
  CHECK(r.exit_code == 1);
  CHECK(r.transcript.find("FAIL: expected 3 got 2") != std::string::npos);
}

TEST_CASE("an error left unchecked at end of script exits 1") {
  ScriptResult r = ScriptRunner().run(
      "env ruby\n"
      "send 1 nope\n");
  CHECK(r.exit_code == 1);
  CHECK(r.transcript.find("!! NoMethodError") != std::string::npos);
}

TEST_CASE("a checked error is consumed") {
  ScriptResult r = ScriptRunner().run(
      "env ruby\n"
      "send 1 nope\n"
      "expect_error NoMethodError\n");
  CHECK(r.exit_code == 0);
}

TEST_CASE("a mismatched error kind fails the expectation") {
  ScriptResult r = ScriptRunner().run(
      "env ruby\n"
      "send 1 nope\n"
      "expect_error TypeError\n");
  CHECK(r.exit_code == 1);
  CHECK(r.transcript.find("FAIL: expected error TypeError got NoMethodError") !=
        std::string::npos);
}

TEST_CASE("unknown commands abort with exit 2") {
  ScriptResult r = ScriptRunner().run("env ruby\nfrobnicate\n");
  CHECK(r.exit_code == 2);
}

TEST_CASE("bootstrap stats preface pins the population") {
  ScriptRunner::Options opt;
  opt.bootstrap_stats = true;
  ScriptResult r = ScriptRunner(opt).run("env ruby\n");
  CHECK(r.transcript.find("bootstrap objects: 32\n") != std::string::npos);
  CHECK(r.transcript.find("bootstrap classes: 32\n") != std::string::npos);
  CHECK(r.transcript.find("bootstrap meta classes: 15\n") !=
        std::string::npos);
  CHECK(r.transcript.find("bootstrap modules: 1\n") != std::string::npos);
}

TEST_CASE("final dump reports lazy growth") {
  ScriptRunner::Options opt;
  opt.dump_final = true;
  ScriptResult r = ScriptRunner(opt).run(
      "env ruby\n"
      "class A super Object\n"
      "send A new\n");
  CHECK(r.transcript.find("--- final hierarchy ---") != std::string::npos);
  // One class brings its metaclass; the instance is one more object.
  CHECK(r.transcript.find("final objects: 35\n") != std::string::npos);
  CHECK(r.transcript.find("final classes: 34\n") != std::string::npos);
}

TEST_CASE("the fuzz seed is reported and steerable") {
  ScriptRunner::Options opt;
  opt.seed = 7;
  ScriptResult a = ScriptRunner(opt).run("env ruby\nfuzz lookup 20\n");
  CHECK(a.exit_code == 0);
  CHECK(a.transcript.find("fuzz lookup: 20 cases ok (seed 7)") !=
        std::string::npos);
  ScriptResult b = ScriptRunner(opt).run("env ruby\nfuzz lookup 20\n");
  CHECK(b.transcript == a.transcript);
}
