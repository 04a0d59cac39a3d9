// Command-line front end: run experiment configs, summarize record files,
// and run the built-in invariant checks.

#include "geom/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

void print_groups(const std::vector<geom::SummaryGroup>& groups) {
  std::printf("%-20s %-13s %8s %7s %6s %12s %12s %12s %5s\n", "experiment", "metric", "sigma", "n", "rows", "median", "q1",
              "q3", "fail");
  for (const auto& g : groups) {
    if (g.stats)
      std::printf("%-20s %-13s %8.4g %7zu %6zu %12.5g %12.5g %12.5g %5zu\n", g.experiment.c_str(), g.metric.c_str(), g.sigma,
                  g.n, g.rows, g.stats->median, g.stats->q1, g.stats->q3, g.failures);
    else
      std::printf("%-20s %-13s %8.4g %7zu %6zu %12s %12s %12s %5zu\n", g.experiment.c_str(), g.metric.c_str(), g.sigma, g.n,
                  g.rows, "-", "-", "-", g.failures);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometry recovery from Gaussian-convolved densities: experiments and checks"};
  app.require_subcommand(1);

  std::string config_path, output_override;
  auto* run = app.add_subcommand("run", "Run one experiment config and write records.csv and summary.json");
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output_override, "Override the config's output_path");

  std::string records_path, json_out;
  auto* summarize = app.add_subcommand("summarize", "Print box-plot statistics for a records.csv file");
  summarize->add_option("records", records_path, "records.csv")->required()->check(CLI::ExistingFile);
  summarize->add_option("--json", json_out, "Also write the summary as JSON to this path");

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      geom::ExperimentConfig cfg = geom::load_config(config_path);
      if (!output_override.empty()) cfg.output_path = output_override;
      const auto records = geom::run_and_persist(cfg);
      print_groups(geom::summarize(records));
      std::printf("wrote %zu records to %s\n", records.size(), cfg.output_path.c_str());
      return 0;
    }
    if (*summarize) {
      std::ifstream in(records_path);
      const auto groups = geom::summarize(geom::read_records_csv(in));
      print_groups(groups);
      if (!json_out.empty()) {
        std::ofstream os(json_out);
        os << geom::summary_to_json(groups).dump(2) << '\n';
      }
      return 0;
    }
    if (*selftest) {
      const int failures = geom::selftest(std::cout);
      std::cout << (failures ? "selftest FAILED" : "selftest passed") << '\n';
      return failures ? 1 : 0;
    }
  } catch (const geom::GeomError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
