#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pdpath/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Composite-problem deblurring experiment: fixed-mu sweep vs "
               "single continuation run, with trade-off curve validation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int parallel = 1;
  auto* run_cmd = app.add_subcommand("run", "run the sweep + continuation experiment");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--out", out_dir, "output directory (overrides config and PDPATH_OUT)");
  run_cmd->add_option("--parallel", parallel, "max concurrent sweep runs")
      ->check(CLI::PositiveNumber);

  std::string records_dir;
  double tol = 1e-4;
  auto* validate_cmd =
      app.add_subcommand("validate", "run trade-off checks on emitted CSVs");
  validate_cmd->add_option("--records", records_dir, "directory with sweep_<k>.csv files")
      ->required();
  validate_cmd->add_option("--tol", tol, "violation tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto cfg = pdpath::ExperimentConfig::from_file(config_path);
      std::string dir = out_dir;
      if (dir.empty()) {
        if (const char* env = std::getenv("PDPATH_OUT")) dir = env;
      }
      if (dir.empty()) dir = cfg.output_dir;
      return pdpath::run_experiment(cfg, dir, parallel);
    }
    return pdpath::validate_records(records_dir, tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
