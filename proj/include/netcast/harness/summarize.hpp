#pragma once

// Summary tables: per-cell CSV, per-(lag, spec, learner) aggregates with
// bootstrap intervals, the coefficient-ratio series and model dumps.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "netcast/csv.hpp"
#include "netcast/evaluation/bootstrap.hpp"
#include "netcast/harness/experiment.hpp"

namespace netcast {

/// One row of cells.csv.
struct CellRow {
  Period period = 0;
  int lag = 0;
  std::string spec;
  std::string learner;
  std::optional<double> auc_pr, auc_roc;
  std::string skip;
  std::string error;
};

struct AggregateRow {
  int lag = 0;
  std::string spec;
  std::string learner;
  std::size_t periods = 0;  ///< cells contributing to the AUC-PR mean
  std::optional<double> mean_auc_pr, pr_lo, pr_hi;
  std::optional<double> mean_auc_roc, roc_lo, roc_hi;
};

inline std::vector<CellRow> cell_rows(const RunResult& r) {
  std::vector<CellRow> out;
  out.reserve(r.cells.size());
  for (const auto& c : r.cells) {
    CellRow row{c.period, c.lag, to_string(c.spec), to_string(c.learner), c.auc_pr, c.auc_roc, {}, {}};
    if (c.status == CellStatus::skipped) row.skip = c.reason;
    if (c.status == CellStatus::error) row.error = c.reason;
    out.push_back(std::move(row));
  }
  return out;
}

inline void write_cells_csv(const std::vector<CellRow>& rows, std::ostream& out) {
  out << "period,lag,spec,learner,auc_pr,auc_roc,skip,error\n";
  for (const auto& r : rows)
    out << r.period << ',' << r.lag << ',' << r.spec << ',' << r.learner << ',' << csv::format(r.auc_pr) << ','
        << csv::format(r.auc_roc) << ',' << csv::sanitize(r.skip) << ',' << csv::sanitize(r.error) << '\n';
}

inline std::vector<CellRow> read_cells_csv(std::istream& in) {
  csv::Reader reader(in, {"period", "lag", "spec", "learner", "auc_pr", "auc_roc", "skip", "error"});
  std::vector<CellRow> rows;
  std::vector<std::string> f;
  auto opt = [&reader](const std::string& s, const char* what) -> std::optional<double> {
    if (s == "NA" || s.empty()) return std::nullopt;
    return csv::parse_double(s, reader.line(), what);
  };
  while (reader.next(f)) {
    CellRow r;
    r.period = csv::parse_int(f[0], reader.line(), "period");
    r.lag = csv::parse_int(f[1], reader.line(), "lag");
    r.spec = f[2];
    r.learner = f[3];
    r.auc_pr = opt(f[4], "auc_pr");
    r.auc_roc = opt(f[5], "auc_roc");
    r.skip = f[6];
    r.error = f[7];
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Means and percentile bootstrap intervals over periods. Skipped and
/// errored cells are excluded; fewer than two values leave the interval
/// undefined. Groups appear in first-seen order.
inline std::vector<AggregateRow> aggregate(const std::vector<CellRow>& rows, std::uint64_t seed, int replicates,
                                           double level) {
  std::vector<AggregateRow> out;
  std::vector<std::pair<std::vector<double>, std::vector<double>>> values;
  std::map<std::tuple<int, std::string, std::string>, std::size_t> index;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.lag, r.spec, r.learner);
    auto [it, fresh] = index.try_emplace(key, out.size());
    if (fresh) {
      out.push_back({r.lag, r.spec, r.learner, 0, {}, {}, {}, {}, {}, {}});
      values.emplace_back();
    }
    if (!r.skip.empty() || !r.error.empty()) continue;
    if (r.auc_pr) values[it->second].first.push_back(*r.auc_pr);
    if (r.auc_roc) values[it->second].second.push_back(*r.auc_roc);
  }
  auto fill = [&](const std::vector<double>& v, std::uint64_t s, std::optional<double>& mean, std::optional<double>& lo,
                  std::optional<double>& hi) {
    if (v.empty()) return;
    double sum = 0.0;
    for (double x : v) sum += x;
    mean = sum / static_cast<double>(v.size());
    if (v.size() < 2) return;
    auto [a, b] = bootstrap_ci(v, replicates, s, level);
    lo = a;
    hi = b;
  };
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& a = out[k];
    a.periods = values[k].first.size();
    const auto base = detail::mix_seed(seed, {static_cast<std::uint64_t>(a.lag), detail::hash_string(a.spec),
                                              detail::hash_string(a.learner)});
    fill(values[k].first, detail::splitmix(base ^ 1), a.mean_auc_pr, a.pr_lo, a.pr_hi);
    fill(values[k].second, detail::splitmix(base ^ 2), a.mean_auc_roc, a.roc_lo, a.roc_hi);
  }
  return out;
}

inline void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "lag,spec,learner,mean_auc_pr,ci_lo,ci_hi,mean_auc_roc,ci_lo,ci_hi\n";
  for (const auto& r : rows)
    out << r.lag << ',' << r.spec << ',' << r.learner << ',' << csv::format(r.mean_auc_pr) << ','
        << csv::format(r.pr_lo) << ',' << csv::format(r.pr_hi) << ',' << csv::format(r.mean_auc_roc) << ','
        << csv::format(r.roc_lo) << ',' << csv::format(r.roc_hi) << '\n';
}

struct Summary {
  std::vector<CellRow> cells;
  std::vector<AggregateRow> aggregates;
};

inline Summary summarize(const RunResult& r) {
  if (r.cells.empty()) throw ArgumentError("nothing to summarize");
  Summary s;
  s.cells = cell_rows(r);
  s.aggregates = aggregate(s.cells, r.config.seed, r.config.bootstrap_replicates, r.config.bootstrap_level);
  return s;
}

/// Writes cells.csv, aggregate.csv, ratios.csv, config.json and, when
/// configured, models/*.json into `dir`.
inline Summary write_outputs(RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const std::filesystem::path& name) {
    std::ofstream f(dir / name);
    if (!f) throw ArgumentError("cannot write " + (dir / name).string());
    return f;
  };
  auto s = summarize(r);
  {
    auto f = open("cells.csv");
    write_cells_csv(s.cells, f);
  }
  {
    auto f = open("aggregate.csv");
    write_aggregate_csv(s.aggregates, f);
  }
  {
    auto f = open("ratios.csv");
    r.ratios.write_csv(f);
  }
  {
    auto f = open("config.json");
    f << to_json(r.config).dump(2) << '\n';
  }
  if (r.config.dump_models) {
    std::filesystem::create_directories(dir / "models");
    for (const auto& c : r.cells) {
      if (!c.model) continue;
      std::ostringstream name;
      name << "models/" << c.period << "_L" << c.lag << '_' << to_string(c.spec) << '_' << to_string(c.learner)
           << ".json";
      auto f = open(name.str());
      f << to_json(*c.model).dump(2) << '\n';
    }
  }
  return s;
}

/// Recomputes aggregate.csv from an output directory's cells.csv and config.json.
inline std::vector<AggregateRow> summarize_directory(const std::filesystem::path& dir) {
  std::ifstream cells(dir / "cells.csv");
  if (!cells) throw ArgumentError("cannot open " + (dir / "cells.csv").string());
  ExperimentConfig cfg;
  if (std::ifstream c(dir / "config.json"); c) {
    try {
      cfg = config_from_json(nlohmann::json::parse(c));
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError(std::string("config.json: ") + e.what());
    }
  }
  const auto rows = read_cells_csv(cells);
  if (rows.empty()) throw ArgumentError("cells.csv has no rows");
  auto agg = aggregate(rows, cfg.seed, cfg.bootstrap_replicates, cfg.bootstrap_level);
  std::ofstream out(dir / "aggregate.csv");
  if (!out) throw ArgumentError("cannot write " + (dir / "aggregate.csv").string());
  write_aggregate_csv(agg, out);
  return agg;
}

}  // namespace netcast
