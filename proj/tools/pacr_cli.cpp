// pacr: run tagged-preamble random access experiments from a JSON config.
//
//   pacr run <config.json> [--seed N] [--trials N] [--out FILE]
//   pacr table1                      print the effective default parameters
//   pacr verify [--golden-dir DIR]   run the acceptance checks

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "pacr/experiment.hpp"
#include "pacr/verify.hpp"

#ifndef PACR_SOURCE_DIR
#define PACR_SOURCE_DIR "."
#endif

namespace {

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::int64_t> trials,
                std::optional<std::string> out) {
  auto cfg = pacr::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (out) cfg.output = *out;
  cfg.validate();
  const auto points = pacr::run_experiment(cfg);
  pacr::write_csv(cfg, points, cfg.output);
  std::fprintf(stderr, "%s: wrote %zu points to %s\n", pacr::to_string(cfg.kind), points.size(), cfg.output.c_str());
  return 0;
}

int table1_command() {
  nlohmann::json j;
  for (auto kind : {pacr::ExperimentKind::kPhyDetection, pacr::ExperimentKind::kRaSuccess,
                    pacr::ExperimentKind::kPuschCollision}) {
    auto cfg = pacr::default_config(kind);
    auto entry = pacr::to_json(cfg);
    entry["derived"] = {{"gamma_pa_linear", cfg.thresholds.pa_linear(cfg.phy.n_zc)},
                        {"gamma_tag_linear", cfg.thresholds.tag_linear(cfg.phy.n_zc)},
                        {"phy_n_cs", cfg.phy.cell().n_cs}};
    nlohmann::json eps = nlohmann::json::array();
    for (const auto& c : cfg.mac.cells) eps.push_back(c.radius_km / c.n_ta_zones);
    entry["derived"]["eps_ta_km"] = eps;
    j[pacr::to_string(kind)] = entry;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int verify_command(const std::string& golden_dir, bool quiet) {
  pacr::verify::Options opt;
  opt.golden_dir = golden_dir;
  bool all = true;
  for (const auto& r : pacr::verify::run_all(opt)) {
    pacr::verify::print(stdout, r, !quiet);
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tagged-preamble random access collision resolution: simulator and analytic engine"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config and write CSV");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  std::optional<std::string> out;
  run->add_option("config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--trials", trials, "Override the Monte Carlo trial count");
  run->add_option("--out", out, "Override the output CSV path");

  auto* table1 = app.add_subcommand("table1", "Print the effective default parameters as JSON");

  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  std::string golden_dir = std::string(PACR_SOURCE_DIR) + "/tests/golden";
  bool quiet = false;
  verify->add_option("--golden-dir", golden_dir, "Directory holding the frozen golden CSV files");
  verify->add_flag("-q,--quiet", quiet, "Print one line per criterion only");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, seed, trials, out);
    if (table1->parsed()) return table1_command();
    if (verify->parsed()) return verify_command(golden_dir, quiet);
  } catch (const pacr::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
