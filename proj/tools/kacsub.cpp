// kacsub command-line tool: kacsub <command> <document> [flags]

#include "kacsub/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>

int main(int argc, char** argv) {
  using namespace kacsub::cli;
  CLI::App app{"Finite-dimensional Kac-algebra coactions, Jones towers and standard invariants"};
  app.set_version_flag("--version", std::string(kToolVersion));
  std::string command, path, output, graph_file;
  Flags flags;
  app.add_option("command", command, "validate | fixed-points | index | tower | invariant | graph")
      ->required()
      ->check(CLI::IsMember({"validate", "fixed-points", "index", "tower", "invariant", "graph"}));
  app.add_option("document", path, "workspace document (JSON, schema 1)")->required()->check(CLI::ExistingFile);
  app.add_option("--eps", flags.eps, "absolute tolerance")->capture_default_str();
  app.add_option("--depth", flags.depth, "tower / lattice depth")->capture_default_str();
  app.add_option("--seed", flags.seed, "seed for randomized splittings")->capture_default_str();
  app.add_option("--format", flags.format, "output format")
      ->check(CLI::IsMember({"json", "dot", "text"}))
      ->capture_default_str();
  app.add_option("-o,--output", output, "write the report here instead of stdout");
  app.add_option("--graph-file", graph_file, "also write the DOT graph here (graph command)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  RunResult res = run(command, text, flags);

  std::string body;
  if (flags.format == "json") {
    body = res.report.dump(2) + "\n";
  } else if (flags.format == "text") {
    body = text_summary(res.report);
  } else {
    body = res.graph.empty() ? text_summary(res.report) : res.graph;
  }
  if (output.empty()) {
    std::cout << body;
  } else {
    std::ofstream(output) << body;
  }
  if (!graph_file.empty() && !res.graph.empty()) std::ofstream(graph_file) << res.graph;
  if (res.exit_code == 2 && res.report.contains("error"))
    std::cerr << "kacsub: " << res.report["error"]["message"].get<std::string>() << "\n";
  return res.exit_code;
}
