#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "orn/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{"engine: evaluate session files of sets, descriptions, and ornaments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a session file and print one record per command");
  std::string file;
  run->add_option("file", file, "session file")->required();
  std::vector<std::string> extra;
  run->add_option("--cmd", extra, "extra command form, evaluated after the file");
  int depth = 3;
  run->add_option("--depth", depth, "default depth for commands that omit one");
  std::string out_path;
  run->add_option("--out", out_path, "write records here instead of standard output");

  CLI11_PARSE(app, argc, argv);

  std::ifstream in(file);
  if (!in) {
    std::cerr << "cannot open session file: " << file << "\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();

  orn::SessionOutcome outcome = orn::run_session(text.str(), depth, extra);
  std::string rendered = orn::render_records(outcome.records);
  if (out_path.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output file: " << out_path << "\n";
      return 2;
    }
    out << rendered;
  }
  return outcome.exit_code;
}
