// Command-line front end: run experiments, generate synthetic panels,
// recompute summaries.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "netcast/netcast.hpp"

namespace fs = std::filesystem;
using namespace netcast;

namespace {

int cmd_run(const std::string& config_path) {
  const auto cfg = load_config(config_path);
  if (cfg.data.events.empty()) throw ArgumentError("config has no data.events path");
  const auto panel = load_events_file(cfg.data.events, cfg.data.registry);
  CovariateTable table;
  if (!cfg.data.covariates.empty()) table = load_covariates_file(cfg.data.covariates, cfg.data.covariate_extensions);
  auto cache = LatentCache::from_environment();
  auto result = run_experiment(cfg, panel, table, &cache);
  for (const auto& line : result.log) std::cerr << line << '\n';
  const auto summary = write_outputs(result, cfg.output_dir);
  std::size_t skipped = 0;
  for (const auto& c : result.cells) skipped += c.status == CellStatus::skipped;
  std::cerr << result.cells.size() << " cells, " << skipped << " skipped, " << result.errors() << " errors; wrote "
            << cfg.output_dir << '\n';
  for (const auto& c : result.cells)
    if (c.status == CellStatus::error)
      std::cerr << "error " << c.period << " L" << c.lag << ' ' << to_string(c.spec) << ' ' << to_string(c.learner)
                << ": " << c.reason << '\n';
  return result.errors() > 0 ? 1 : 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  std::ifstream in(spec_path);
  if (!in) throw ArgumentError("cannot open " + spec_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(spec_path + ": " + e.what());
  }
  const auto data = generate_synthetic(synthetic_spec_from_json(j));
  write_synthetic(data, out_dir);
  std::cerr << data.events.size() << " events, positive rate " << data.truth.positive_rate << ", wrote " << out_dir
            << '\n';
  return 0;
}

int cmd_summarize(const std::string& dir) {
  const auto rows = summarize_directory(dir);
  write_aggregate_csv(rows, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rolling-origin link forecasting on temporal event networks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment and write summary tables");
  run->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);

  std::string spec_path, out_dir;
  auto* synth = app.add_subcommand("synth", "generate a synthetic event panel");
  synth->add_option("--spec", spec_path, "synthetic spec (JSON)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "output directory")->required();

  std::string in_dir;
  auto* summ = app.add_subcommand("summarize", "recompute aggregate.csv from cells.csv");
  summ->add_option("--in", in_dir, "output directory of a previous run")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path);
    if (*synth) return cmd_synth(spec_path, out_dir);
    if (*summ) return cmd_summarize(in_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
