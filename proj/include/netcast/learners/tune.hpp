#pragma once

// Tuning-parameter selection by stratified k-fold cross-validation on
// validation AUC-PR. An optimum on a grid edge extends the grid
// geometrically and repeats (bounded number of extensions).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcast/errors.hpp"
#include "netcast/evaluation/metrics.hpp"
#include "netcast/learners/elastic_net.hpp"
#include "netcast/learners/logit.hpp"
#include "netcast/learners/logitboost.hpp"
#include "netcast/learners/model.hpp"
#include "netcast/learners/neural_net.hpp"

namespace netcast {

struct TuneGrid {
  std::vector<double> lambda{0.1, 0.3, 1.0, 3.0, 10.0, 30.0};
  std::vector<int> boost_iterations{10, 20, 40, 80, 160};
  std::vector<int> hidden{1, 2, 4};
  std::vector<double> decay{0.01, 0.1, 1.0};
  int max_extensions = 3;
};

struct TuneConfig {
  TuneGrid grid;
  int folds = 5;
  ElasticNetOptions elastic_net;
  LogitBoostOptions logitboost;
  NeuralNetOptions neural_net;
  LogitOptions logit;
};

struct TuneResult {
  std::map<std::string, double> values;
  std::vector<std::string> extensions;  ///< e.g. "lambda:+100"
  std::map<std::string, double> scores; ///< "name=value[,name=value]" -> mean validation AUC-PR
  int folds = 0;
};

/// Fold index per row, stratified by label. The fold count shrinks when a
/// class has fewer members than folds; fewer than two usable folds is an error.
inline std::vector<int> stratified_folds(const Eigen::VectorXd& y, int folds, std::uint64_t seed, int* used = nullptr) {
  if (folds < 2) throw TuningError("cross-validation needs at least 2 folds");
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = 0; i < y.size(); ++i) (y(i) > 0.5 ? pos : neg).push_back(i);
  const int k = static_cast<int>(std::min<std::size_t>({static_cast<std::size_t>(folds), pos.size(), neg.size()}));
  if (k < 2) throw TuningError("too few positives or negatives for cross-validation");
  std::mt19937_64 rng(seed);
  std::shuffle(pos.begin(), pos.end(), rng);
  std::shuffle(neg.begin(), neg.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(y.size()), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) fold[static_cast<std::size_t>(pos[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < neg.size(); ++i) fold[static_cast<std::size_t>(neg[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
  if (used) *used = k;
  return fold;
}

namespace detail {

struct FoldData {
  Eigen::MatrixXd train_z, valid_z;
  Eigen::VectorXd train_y;
  std::vector<int> valid_y;
};

inline std::vector<FoldData> split_folds(const TrainingSet& t, const std::vector<int>& fold, int k) {
  std::vector<FoldData> out(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? va : tr).push_back(static_cast<Eigen::Index>(i));
    auto& d = out[static_cast<std::size_t>(f)];
    d.train_z = t.z(tr, Eigen::all);
    d.valid_z = t.z(va, Eigen::all);
    d.train_y = t.y(tr);
    for (auto i : va) d.valid_y.push_back(t.y(i) > 0.5 ? 1 : 0);
  }
  return out;
}

inline double validation_auc_pr(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  return auc_pr(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), labels);
}

/// Extends a geometric grid past the edge where the optimum sits. Returns false at a hard bound.
template <typename T>
bool extend_grid(std::vector<T>& grid, bool at_low, T hard_min) {
  const double ratio = grid.size() >= 2 ? static_cast<double>(grid[1]) / static_cast<double>(grid[0])
                                         : 10.0;
  const double r = (ratio > 1.0 ? ratio : 2.0);
  if (at_low) {
    T v;
    if constexpr (std::is_integral_v<T>) v = std::max<T>(hard_min, static_cast<T>(std::floor(grid.front() / r)));
    else v = static_cast<T>(grid.front() / r);
    if (v >= grid.front() || v < hard_min) return false;
    grid.insert(grid.begin(), v);
  } else {
    const double rr = grid.size() >= 2 ? static_cast<double>(grid.back()) / static_cast<double>(grid[grid.size() - 2]) : r;
    T v;
    if constexpr (std::is_integral_v<T>) v = std::max<T>(grid.back() + 1, static_cast<T>(std::ceil(grid.back() * rr)));
    else v = static_cast<T>(grid.back() * rr);
    grid.push_back(v);
  }
  return true;
}

inline std::string key(const std::string& a, double va) {
  return a + "=" + csv::format(va);
}

inline std::string key(const std::string& a, double va, const std::string& b, double vb) {
  return key(a, va) + "," + key(b, vb);
}

}  // namespace detail

/// Selects tuning values for `kind` (the plain logit has none).
inline TuneResult tune(LearnerKind kind, const TrainingSet& train, const TuneConfig& cfg, std::uint64_t seed) {
  TuneResult result;
  const auto& g = cfg.grid;
  if (kind == LearnerKind::logit) return result;

  auto single = [&](const char* name, double v) {
    result.values[name] = v;
    return result;
  };
  if (kind == LearnerKind::elastic_net && g.lambda.size() == 1) return single("lambda", g.lambda[0]);
  if (kind == LearnerKind::logitboost && g.boost_iterations.size() == 1) return single("iterations", g.boost_iterations[0]);
  if (kind == LearnerKind::neural_net && g.hidden.size() == 1 && g.decay.size() == 1) {
    result.values["hidden"] = g.hidden[0];
    result.values["decay"] = g.decay[0];
    return result;
  }

  int k = 0;
  const auto fold = stratified_folds(train.y, cfg.folds, seed, &k);
  result.folds = k;
  const auto data = detail::split_folds(train, fold, k);

  if (kind == LearnerKind::elastic_net) {
    std::vector<double> grid = g.lambda;
    std::sort(grid.begin(), grid.end());
    std::map<double, double> score;
    for (int ext = 0;; ++ext) {
      std::vector<double> pending;
      for (auto it = grid.rbegin(); it != grid.rend(); ++it)
        if (!score.count(*it)) pending.push_back(*it);
      for (const auto& d : data) {
        // Warm starts run from large to small lambda.
        LinearParams warm;
        bool have = false;
        for (double lam : pending) {
          Convergence conv;
          auto p = detail::elastic_net_solve(d.train_z, d.train_y, lam, cfg.elastic_net, conv, have ? &warm : nullptr);
          warm = p;
          have = true;
          score[lam] += detail::validation_auc_pr(predict_linear(p, d.valid_z), d.valid_y) / k;
        }
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (score[grid[i]] > score[grid[best]]) best = i;
      const bool low = best == 0, high = best + 1 == grid.size();
      if ((!low && !high) || ext >= g.max_extensions) {
        result.values["lambda"] = grid[best];
        break;
      }
      if (!detail::extend_grid(grid, low, 0.0)) {
        result.values["lambda"] = grid[best];
        break;
      }
      result.extensions.push_back(std::string("lambda:") + (low ? "-" : "+") + csv::format(low ? grid.front() : grid.back()));
    }
    for (const auto& [v, s] : score) result.scores[detail::key("lambda", v)] = s;
    return result;
  }

  if (kind == LearnerKind::logitboost) {
    std::vector<int> grid = g.boost_iterations;
    std::sort(grid.begin(), grid.end());
    std::map<int, double> score;
    for (int ext = 0;; ++ext) {
      std::vector<int> pending;
      for (int m : grid)
        if (!score.count(m)) pending.push_back(m);
      for (const auto& d : data) {
        Convergence conv;
        auto p = detail::logitboost_train(d.train_z, d.train_y, pending.back(), cfg.logitboost, conv);
        for (int m : pending)
          score[m] += detail::validation_auc_pr(predict_boost(p, d.valid_z, static_cast<std::size_t>(m)), d.valid_y) / k;
      }
      std::size_t best = 0;
      for (std::size_t i = 1; i < grid.size(); ++i)
        if (score[grid[i]] > score[grid[best]]) best = i;
      const bool low = best == 0, high = best + 1 == grid.size();
      if ((!low && !high) || ext >= g.max_extensions || !detail::extend_grid(grid, low, 1)) {
        result.values["iterations"] = grid[best];
        break;
      }
      result.extensions.push_back(std::string("iterations:") + (low ? "-" : "+") +
                                  std::to_string(low ? grid.front() : grid.back()));
    }
    for (const auto& [v, s] : score) result.scores[detail::key("iterations", v)] = s;
    return result;
  }

  // Neural network: two-dimensional grid.
  std::vector<int> hidden = g.hidden;
  std::vector<double> decay = g.decay;
  std::sort(hidden.begin(), hidden.end());
  std::sort(decay.begin(), decay.end());
  std::map<std::pair<int, double>, double> score;
  for (int ext = 0;; ++ext) {
    for (int h : hidden)
      for (double dcy : decay) {
        if (score.count({h, dcy})) continue;
        double total = 0.0;
        for (std::size_t f = 0; f < data.size(); ++f) {
          const auto& d = data[f];
          auto r = detail::neural_net_train(d.train_z, d.train_y, h, dcy, seed + 7919 * (f + 1), cfg.neural_net);
          total += detail::validation_auc_pr(predict_net(r.params, d.valid_z), d.valid_y);
        }
        score[{h, dcy}] = total / k;
      }
    std::pair<int, double> best{hidden[0], decay[0]};
    for (int h : hidden)
      for (double dcy : decay)
        if (score[{h, dcy}] > score[best]) best = {h, dcy};
    const auto hi = std::find(hidden.begin(), hidden.end(), best.first) - hidden.begin();
    const auto di = std::find(decay.begin(), decay.end(), best.second) - decay.begin();
    bool extended = false;
    if (ext < g.max_extensions) {
      if (hidden.size() > 1 && (hi == 0 || hi + 1 == static_cast<long>(hidden.size())) &&
          detail::extend_grid(hidden, hi == 0, 1)) {
        result.extensions.push_back(std::string("hidden:") + (hi == 0 ? "-" : "+") +
                                    std::to_string(hi == 0 ? hidden.front() : hidden.back()));
        extended = true;
      }
      if (decay.size() > 1 && (di == 0 || di + 1 == static_cast<long>(decay.size())) &&
          detail::extend_grid(decay, di == 0, 0.0)) {
        result.extensions.push_back(std::string("decay:") + (di == 0 ? "-" : "+") +
                                    csv::format(di == 0 ? decay.front() : decay.back()));
        extended = true;
      }
    }
    if (!extended) {
      result.values["hidden"] = best.first;
      result.values["decay"] = best.second;
      break;
    }
  }
  for (const auto& [v, s] : score) result.scores[detail::key("hidden", v.first, "decay", v.second)] = s;
  return result;
}

inline FittedModel fit_elastic_net(const TrainingSet& train, const TuneConfig& cfg, std::uint64_t seed) {
  require_both_classes(train.y);
  auto t = tune(LearnerKind::elastic_net, train, cfg, seed);
  auto m = fit_elastic_net_fixed(train, t.values.at("lambda"), cfg.elastic_net);
  m.grid_extensions = t.extensions;
  m.seed = seed;
  return m;
}

inline FittedModel fit_logitboost(const TrainingSet& train, const TuneConfig& cfg, std::uint64_t seed) {
  require_both_classes(train.y);
  auto t = tune(LearnerKind::logitboost, train, cfg, seed);
  auto m = fit_logitboost_fixed(train, static_cast<int>(t.values.at("iterations")), cfg.logitboost);
  m.grid_extensions = t.extensions;
  m.seed = seed;
  return m;
}

inline FittedModel fit_neural_net(const TrainingSet& train, const TuneConfig& cfg, std::uint64_t seed) {
  require_both_classes(train.y);
  auto t = tune(LearnerKind::neural_net, train, cfg, seed);
  auto m = fit_neural_net_fixed(train, static_cast<int>(t.values.at("hidden")), t.values.at("decay"), seed,
                                cfg.neural_net);
  m.grid_extensions = t.extensions;
  return m;
}

/// Fits (and tunes) a learner of the given kind.
inline FittedModel fit(LearnerKind kind, const TrainingSet& train, const TuneConfig& cfg, std::uint64_t seed) {
  switch (kind) {
    case LearnerKind::logit: {
      auto m = fit_logit(train, cfg.logit);
      m.seed = seed;
      return m;
    }
    case LearnerKind::elastic_net: return fit_elastic_net(train, cfg, seed);
    case LearnerKind::logitboost: return fit_logitboost(train, cfg, seed);
    case LearnerKind::neural_net: return fit_neural_net(train, cfg, seed);
  }
  throw ArgumentError("unknown learner kind");
}

}  // namespace netcast
