#pragma once

// Per-dyad design matrices for one outcome period: endogenous statistics on
// the lagged network, exogenous covariates, or both.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcast/covariates.hpp"
#include "netcast/endogenous_features.hpp"
#include "netcast/errors.hpp"
#include "netcast/latent/structure.hpp"
#include "netcast/panel.hpp"

namespace netcast {

enum class SpecClass { endogenous, covariates, combined };

inline std::string to_string(SpecClass s) {
  switch (s) {
    case SpecClass::endogenous: return "endogenous";
    case SpecClass::covariates: return "covariates";
    case SpecClass::combined: return "combined";
  }
  return "?";
}

inline SpecClass spec_class_from_string(const std::string& s) {
  if (s == "endogenous" || s == "endogenous-only") return SpecClass::endogenous;
  if (s == "covariates" || s == "covariates-only") return SpecClass::covariates;
  if (s == "combined") return SpecClass::combined;
  throw ArgumentError("unknown spec class '" + s + "'");
}

enum class CovariateTiming {
  previous_period,  ///< value at t-1
  window_mean,      ///< mean of available values over [t-L, t-1]
};

struct FeatureConfig {
  std::vector<std::string> covariates;  ///< empty: every declared covariate with data
  CovariateTiming timing = CovariateTiming::previous_period;
  bool flow_excludes_focal_edge = false;
  double max_missing_share = 0.5;
  LatentConfig latent;
};

struct DyadDesign {
  Period outcome = 0;
  int lag = 0;
  SpecClass spec = SpecClass::combined;
  std::vector<std::string> feature_names;
  std::vector<Dyad> dyads;
  std::vector<int> labels;
  Eigen::MatrixXd features;  ///< dyads x feature_names
};

/// The eight endogenous statistics for each dyad, columns in
/// `endogenous_feature_names()` order. Dyad endpoints must lie in the
/// network's node set.
inline Eigen::MatrixXd feature_block(const NeighborIndex& ix, const std::vector<Dyad>& dyads, const LatentFits& fits,
                                     bool flow_excludes_focal_edge = false) {
  const auto& net = ix.network();
  double density = 0.0;
  if (net.nodes.size() > 1)
    density = static_cast<double>(net.edges.size()) /
              (static_cast<double>(net.nodes.size()) * static_cast<double>(net.nodes.size() - 1));
  Eigen::MatrixXd out(static_cast<Eigen::Index>(dyads.size()), 8);
  for (std::size_t r = 0; r < dyads.size(); ++r) {
    const auto [i, j] = dyads[r];
    const auto row = static_cast<Eigen::Index>(r);
    out(row, 0) = memory(ix, i, j);
    out(row, 1) = static_cast<double>(flow(ix, i, j, flow_excludes_focal_edge));
    out(row, 2) = static_cast<double>(common_combatants(ix, i, j));
    out(row, 3) = adamic_adar(ix, i, j);
    out(row, 4) = jaccard(ix, i, j);
    out(row, 5) = common_community(fits.communities, i, j);
    // Too few nodes for the configured block count: one block, i.e. the density.
    out(row, 6) = fits.mmsbm ? mmsbm_prob(*fits.mmsbm, i, j) : density;
    out(row, 7) = latent_distance(fits.latent_space, i, j);
  }
  return out;
}

inline Eigen::MatrixXd feature_block(const LaggedNetwork& net, const std::vector<Dyad>& dyads, const LatentFits& fits,
                                     bool flow_excludes_focal_edge = false) {
  return feature_block(NeighborIndex(net), dyads, fits, flow_excludes_focal_edge);
}

/// Covariate names the design will use.
inline std::vector<std::string> design_covariates(const CovariateTable& table, const FeatureConfig& cfg) {
  if (cfg.covariates.empty()) return table.present_names();
  for (const auto& c : cfg.covariates)
    if (!table.find(c)) throw ArgumentError("unknown covariate '" + c + "'");
  return cfg.covariates;
}

/// Builds the design for outcome period `t` with predictive window [t-lag, t-1].
/// Each covariate contributes a value column (0 when missing) and a
/// `<name>:missing` indicator column.
inline DyadDesign build_design(const EventPanel& panel, const CovariateTable& table, Period t, int lag, SpecClass spec,
                               const FeatureConfig& cfg, std::uint64_t seed, LatentCache* cache = nullptr) {
  if (lag < 1) throw ArgumentError("lag must be >= 1");
  DyadDesign d;
  d.outcome = t;
  d.lag = lag;
  d.spec = spec;
  d.dyads = eligible_dyads(panel, t);

  const auto outcome_net = aggregate_window(panel, t, t);
  d.labels.reserve(d.dyads.size());
  for (const auto& dy : d.dyads) d.labels.push_back(outcome_net.has_edge(dy.sender, dy.receiver) ? 1 : 0);

  Eigen::MatrixXd endo;
  if (spec != SpecClass::covariates && d.dyads.empty()) {
    endo.resize(0, 8);
    d.feature_names = endogenous_feature_names();
  } else if (spec != SpecClass::covariates) {
    const auto net = aggregate_window(panel, t - lag, t - 1);
    std::shared_ptr<const LatentFits> fits;
    if (cache) {
      fits = cache->get(net, cfg.latent, seed);
    } else {
      fits = std::make_shared<const LatentFits>(fit_latent_structure(net, cfg.latent, seed));
    }
    endo = feature_block(net, d.dyads, *fits, cfg.flow_excludes_focal_edge);
    d.feature_names = endogenous_feature_names();
  }

  Eigen::MatrixXd exo;
  if (spec != SpecClass::endogenous) {
    const auto names = design_covariates(table, cfg);
    const auto rows = static_cast<Eigen::Index>(d.dyads.size());
    exo = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(2 * names.size()));
    const auto& ids = panel.nodes();
    for (std::size_t c = 0; c < names.size(); ++c) {
      const std::size_t k = *table.find(names[c]);
      std::size_t missing = 0;
      for (std::size_t r = 0; r < d.dyads.size(); ++r) {
        const auto& si = ids[static_cast<std::size_t>(d.dyads[r].sender)];
        const auto& rj = ids[static_cast<std::size_t>(d.dyads[r].receiver)];
        std::optional<double> v;
        if (cfg.timing == CovariateTiming::previous_period) {
          v = table.get(t - 1, si, rj, k);
        } else {
          double sum = 0.0;
          int count = 0;
          for (Period p = t - lag; p <= t - 1; ++p)
            if (auto x = table.get(p, si, rj, k)) {
              sum += *x;
              ++count;
            }
          if (count > 0) v = sum / count;
        }
        const auto row = static_cast<Eigen::Index>(r);
        if (v) {
          exo(row, static_cast<Eigen::Index>(2 * c)) = *v;
        } else {
          exo(row, static_cast<Eigen::Index>(2 * c + 1)) = 1.0;
          ++missing;
        }
      }
      if (!d.dyads.empty() &&
          static_cast<double>(missing) > cfg.max_missing_share * static_cast<double>(d.dyads.size()))
        throw DataError("covariate '" + names[c] + "' missing for " + std::to_string(missing) + " of " +
                        std::to_string(d.dyads.size()) + " dyads in outcome period " + std::to_string(t));
      d.feature_names.push_back(names[c]);
      d.feature_names.push_back(names[c] + ":missing");
    }
  }

  d.features.resize(static_cast<Eigen::Index>(d.dyads.size()), endo.cols() + exo.cols());
  if (endo.cols() > 0) d.features.leftCols(endo.cols()) = endo;
  if (exo.cols() > 0) d.features.rightCols(exo.cols()) = exo;
  return d;
}

}  // namespace netcast
