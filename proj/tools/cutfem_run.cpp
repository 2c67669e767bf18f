#include "cutfem/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Cut finite element experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool quiet = false;
  CLI::App* run = app.add_subcommand("run", "Run the study described by a JSON config");
  run->add_option("config", config_path, "Path to the experiment config")->required();
  run->add_option("--out", out_dir, "Output directory (overrides output.path)");
  run->add_option("--threads", threads, "Worker threads for independent levels and shifts")
      ->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "Suppress progress output");

  CLI11_PARSE(app, argc, argv);

  try {
    const cutfem::ExperimentConfig config = cutfem::load_config(config_path);
    cutfem::RunOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    options.quiet = quiet;
    cutfem::run_experiment(config, options, &std::cerr);
  } catch (const cutfem::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
