#include <iostream>

#include <CLI11.hpp>

#include "morse_atlas/cli.hpp"

using namespace morse_atlas;

int main(int argc, char** argv) {
  CLI::App app{"Morse boundary atlas: graphs of groups, Bass-Serre balls, star reduction, 3-manifold classifier"};
  app.set_version_flag("--version", std::string("morse-atlas ") + kVersion);
  app.require_subcommand(1);

  JobSpec job;
  std::vector<std::string> W;
  std::size_t max_cells = 0;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "Morse boundary type of a 3-manifold decomposition"},
      {"validate-star", "check a graph of groups is a relatively hyperbolic Morseless star"},
      {"trivialize", "replace the edge groups of a Morseless star by trivial groups"},
      {"reduce", "trivialize all edge groups around the vertex set W"},
      {"ball", "ball in the Cayley graph or the Bass-Serre space"},
      {"critical-values", "critical values of axis segments through the basepoint"},
      {"bad-segments", "centered geodesic segments with large critical value"},
      {"check-tree-map", "check a tree map or an empty-boundary local bijection"},
      {"corpus", "run every JSON file in a directory concurrently"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("input", job.input, name == "corpus" ? "corpus directory" : "input JSON file")->required();
    sub->add_option("--radius", job.radius, "ball radius")->capture_default_str();
    sub->add_option("--gauge", job.gauge, "Morse gauge expression a*l+b*e+c")->capture_default_str();
    sub->add_option("--qc", job.qc, "quasi-geodesic constants lambda,eps")->capture_default_str();
    sub->add_option("--threshold", job.threshold, "critical-value threshold")->capture_default_str();
    sub->add_option("--max-length", job.max_length, "longest segment searched (-1: radius or radius/2)");
    sub->add_option("--max-cells", max_cells, "enumeration cap (overrides MORSE_ATLAS_MAX_CELLS)");
    sub->add_option("--vertex", job.vertex, "vertex name (star center or bijection vertex)");
    sub->add_option("--W", W, "vertex set for reduce (overrides the input's W)")->delimiter(',');
    sub->add_flag("--json", job.json, "JSON report");
    sub->add_option("--dot", job.dot, "write a DOT drawing to this path");
    sub->callback([&job, name] { job.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  if (max_cells > 0) job.max_cells = max_cells;
  if (!W.empty()) job.W = W;
  try {
    MorseGauge::parse(job.gauge);
  } catch (const Error& e) {
    std::cerr << "ParseError: --gauge: " << e.what() << "\n";
    return kExitUsage;
  }

  auto r = run_job(job);
  std::cout << r.report;
  if (!r.error.empty()) std::cerr << r.error << "\n";
  return r.exit;
}
