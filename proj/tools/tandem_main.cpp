#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tandem/script.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tandem: dual-environment object model driver"};

  std::string script_path;
  tandem::ScriptRunner::Options opt;
  app.add_option("--script", script_path, "Script file (default: stdin)");
  app.add_flag("--dump-final", opt.dump_final,
               "Append every registered class hierarchy after the run");
  app.add_flag("--bootstrap-stats", opt.bootstrap_stats,
               "Print object space counts before the script runs");
  app.add_option("--seed", opt.seed, "Seed for fuzz commands");

  CLI11_PARSE(app, argc, argv);

  std::string text;
  if (script_path.empty()) {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    text = buf.str();
  } else {
    std::ifstream f(script_path);
    if (!f) {
      std::cerr << "cannot open script: " << script_path << "\n";
      return 2;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    text = buf.str();
  }

  tandem::ScriptRunner runner(opt);
  tandem::ScriptResult result = runner.run(text);
  std::cout << result.transcript;
  return result.exit_code;
}
