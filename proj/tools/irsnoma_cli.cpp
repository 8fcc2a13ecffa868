#include <CLI11.hpp>
#include <cstdint>
#include <iostream>

#include "irsnoma/experiment.hpp"

namespace {

int execute(irsnoma::ExperimentConfig cfg, const std::string& out_override,
            std::uint64_t seed_override, bool have_seed, int jobs) {
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (have_seed) cfg.master_seed = seed_override;

  const std::size_t runs = cfg.m_values.size() * cfg.n_values.size() *
                           cfg.k_values.size() * cfg.methods.size() *
                           static_cast<std::size_t>(cfg.realizations);
  std::cout << "running " << runs << " runs into " << cfg.out_dir << " (seed "
            << cfg.master_seed << ", jobs " << jobs << ")\n";

  const irsnoma::ExperimentResult result = irsnoma::run_experiment(cfg, jobs);
  const auto written = irsnoma::emit_outputs(result, cfg.out_dir);
  for (const auto& path : written) std::cout << "wrote " << path << '\n';

  int failed = 0;
  for (const auto& row : result.rows) {
    if (row.status != "converged") ++failed;
  }
  std::cout << result.rows.size() - failed << "/" << result.rows.size()
            << " runs converged\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IRS-assisted NOMA downlink power minimization simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int jobs = 1;

  auto* run = app.add_subcommand("run", "run the sweep described by a config file");
  run->add_option("--config", config_path, "config file path")->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  auto* run_seed = run->add_option("--seed", seed, "master seed (overrides config)");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  std::string figure_name;
  std::string scale_name = "desk";
  auto* figure = app.add_subcommand("figure", "run a canned figure preset");
  figure->add_option("name", figure_name, "one of a, b, c, d")->required();
  figure->add_option("--scale", scale_name, "paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  figure->add_option("--out", out_dir, "output directory (overrides preset)");
  auto* figure_seed = figure->add_option("--seed", seed, "master seed");
  figure->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("--config", config_path, "config file path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) {
      return execute(irsnoma::load_config(config_path), out_dir, seed,
                     run_seed->count() > 0, jobs);
    }
    if (app.got_subcommand(figure)) {
      if (figure_name.size() != 1 || figure_name[0] < 'a' || figure_name[0] > 'd') {
        std::cerr << "error: figure name must be one of a, b, c, d\n";
        return 1;
      }
      const auto scale = scale_name == "paper" ? irsnoma::ScalePreset::Paper
                                               : irsnoma::ScalePreset::Desk;
      return execute(irsnoma::figure_preset(figure_name[0], scale), out_dir, seed,
                     figure_seed->count() > 0, jobs);
    }
    if (app.got_subcommand(validate)) {
      const irsnoma::ExperimentConfig cfg = irsnoma::load_config(config_path);
      const std::size_t points =
          cfg.m_values.size() * cfg.n_values.size() * cfg.k_values.size();
      std::cout << "config OK: " << points << " sweep point(s) x "
                << cfg.methods.size() << " method(s) x " << cfg.realizations
                << " realization(s)\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
