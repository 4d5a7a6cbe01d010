#pragma once

// Rolling-origin experiment: for every outcome period, lag window and spec
// class, fit each learner on the preceding D outcome periods and score the
// test period.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "netcast/covariates.hpp"
#include "netcast/design.hpp"
#include "netcast/evaluation/diagnostics.hpp"
#include "netcast/evaluation/metrics.hpp"
#include "netcast/harness/config.hpp"
#include "netcast/learners/tune.hpp"
#include "netcast/panel.hpp"

namespace netcast {

enum class CellStatus { ok, skipped, error };

struct CellResult {
  Period period = 0;
  int lag = 0;
  SpecClass spec = SpecClass::combined;
  LearnerKind learner = LearnerKind::logit;
  CellStatus status = CellStatus::ok;
  std::string reason;  ///< skip or error message
  std::optional<double> auc_pr, auc_roc;
  std::vector<Dyad> dyads;  ///< test rows
  std::vector<double> scores;
  std::vector<int> labels;
  std::shared_ptr<const FittedModel> model;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;  ///< ordered by period, lag, spec, learner in config order
  RatioSeries ratios;
  std::vector<std::string> log;

  std::size_t errors() const {
    return static_cast<std::size_t>(
        std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return c.status == CellStatus::error; }));
  }
};

namespace detail {

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix(seed);
  for (auto p : parts) h = splitmix(h ^ p);
  return h;
}

/// Seed for one cell. Depends only on the cell's own coordinates.
inline std::uint64_t cell_seed(std::uint64_t seed, Period t, int lag, SpecClass spec, LearnerKind learner) {
  return mix_seed(seed, {static_cast<std::uint64_t>(static_cast<std::int64_t>(t)), static_cast<std::uint64_t>(lag),
                         hash_string(to_string(spec)), hash_string(to_string(learner))});
}

struct Unit {
  Period t;
  int lag;
  SpecClass spec;
};

struct UnitOutput {
  std::vector<CellResult> cells;
  std::optional<std::vector<RatioEntry>> ratio;
  std::vector<std::string> log;
};

inline std::optional<std::string> history_gap(const EventPanel& panel, Period t, int lag, int depth) {
  const auto range = panel.period_range();
  if (!range) return "empty panel";
  if (t > range->second) return "outcome period beyond data";
  if (t - depth - lag < range->first) return "insufficient history";
  return std::nullopt;
}

inline UnitOutput run_unit(const ExperimentConfig& cfg, const EventPanel& panel, const CovariateTable& table,
                           const Unit& u, LatentCache& cache) {
  UnitOutput out;
  auto blank = [&](LearnerKind k) {
    CellResult c;
    c.period = u.t;
    c.lag = u.lag;
    c.spec = u.spec;
    c.learner = k;
    return c;
  };

  if (auto gap = history_gap(panel, u.t, u.lag, cfg.training_depth)) {
    for (auto k : cfg.learners) {
      auto c = blank(k);
      c.status = CellStatus::skipped;
      c.reason = *gap;
      out.cells.push_back(std::move(c));
    }
    out.log.push_back("skip period " + std::to_string(u.t) + " lag " + std::to_string(u.lag) + " " +
                      to_string(u.spec) + ": " + *gap);
    return out;
  }

  const std::uint64_t latent_seed = mix_seed(cfg.seed, {hash_string("latent")});
  DyadDesign test;
  TrainingSet train;
  try {
    std::vector<DyadDesign> parts;
    Eigen::Index rows = 0;
    for (Period s = u.t - cfg.training_depth; s < u.t; ++s) {
      parts.push_back(build_design(panel, table, s, u.lag, u.spec, cfg.features, latent_seed, &cache));
      rows += parts.back().features.rows();
    }
    Eigen::MatrixXd x(rows, parts.front().features.cols());
    std::vector<int> labels;
    Eigen::Index r = 0;
    for (const auto& p : parts) {
      x.middleRows(r, p.features.rows()) = p.features;
      r += p.features.rows();
      labels.insert(labels.end(), p.labels.begin(), p.labels.end());
    }
    train = TrainingSet::make(x, labels, parts.front().feature_names);
    test = build_design(panel, table, u.t, u.lag, u.spec, cfg.features, latent_seed, &cache);
  } catch (const Error& e) {
    for (auto k : cfg.learners) {
      auto c = blank(k);
      c.status = CellStatus::error;
      c.reason = e.what();
      out.cells.push_back(std::move(c));
    }
    return out;
  }

  std::size_t positives = 0;
  for (int l : test.labels) positives += static_cast<std::size_t>(l);

  const FittedModel* logit_model = nullptr;
  const FittedModel* en_model = nullptr;
  for (auto k : cfg.learners) {
    auto c = blank(k);
    c.dyads = test.dyads;
    c.labels = test.labels;
    try {
      auto m = std::make_shared<FittedModel>(fit(k, train, cfg.tuning, cell_seed(cfg.seed, u.t, u.lag, u.spec, k)));
      const Eigen::VectorXd s = predict(*m, test.features, test.feature_names);
      c.scores.assign(s.data(), s.data() + s.size());
      c.model = m;
      if (k == LearnerKind::logit) logit_model = m.get();
      if (k == LearnerKind::elastic_net) en_model = m.get();
      if (positives == 0) {
        c.status = CellStatus::skipped;
        c.reason = "no positives in test period";
      } else {
        c.auc_pr = auc_pr(c.scores, c.labels);
        if (positives < c.labels.size()) c.auc_roc = auc_roc(c.scores, c.labels);
      }
    } catch (const Error& e) {
      c.status = CellStatus::error;
      c.reason = e.what();
      c.scores.clear();
      c.model.reset();
    }
    out.cells.push_back(std::move(c));
  }
  if (logit_model && en_model) out.ratio = coefficient_ratio(*en_model, *logit_model);
  return out;
}

}  // namespace detail

/// Runs every configured cell. Results do not depend on `config.threads`.
inline RunResult run_experiment(const ExperimentConfig& config, const EventPanel& panel, const CovariateTable& table,
                                LatentCache* cache = nullptr) {
  RunResult result;
  result.config = config;
  LatentCache local;
  LatentCache& shared = cache ? *cache : local;

  std::vector<detail::Unit> units;
  for (Period t = config.first_period; t <= config.last_period; ++t)
    for (int lag : config.lags)
      for (auto spec : config.specs) units.push_back({t, lag, spec});

  std::vector<detail::UnitOutput> outputs(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < units.size(); k = next++)
      outputs[k] = detail::run_unit(config, panel, table, units[k], shared);
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.threads));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < std::min(threads, units.size()); ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t k = 0; k < units.size(); ++k) {
    auto& o = outputs[k];
    for (auto& c : o.cells) result.cells.push_back(std::move(c));
    if (o.ratio) result.ratios.add(units[k].lag, to_string(units[k].spec), units[k].t, *o.ratio);
    for (auto& l : o.log) result.log.push_back(std::move(l));
  }
  return result;
}

}  // namespace netcast
