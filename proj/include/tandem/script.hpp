#pragma once

#include <string>

#include "tandem/kernel.hpp"

namespace tandem {

// Renders the hierarchy of a class or object: instance-of spine, then the
// ruby chain with per-node pointers, then the smalltalk chain. The
// smalltalk section never mentions ruby-side state, so ruby-only edits
// leave it byte-identical.
std::string inspect_hierarchy(const ObjectSpace& sp, const Value& target);

struct ScriptResult {
  std::string transcript;
  int exit_code = 0;  // 0 ok, 1 failed expectations, 2 parse error
};

// Line-oriented script driver. Each run boots a fresh runtime, so the
// transcript is a pure function of script text and options.
class ScriptRunner {
 public:
  struct Options {
    bool dump_final = false;
    bool bootstrap_stats = false;
    unsigned seed = 0;
  };

  ScriptRunner() = default;
  explicit ScriptRunner(Options opt) : opt_(opt) {}

  ScriptResult run(const std::string& script_text);

 private:
  Options opt_;
};

}  // namespace tandem
