#pragma once

// Synthetic event panels with planted structure: block affinity, edge
// persistence and covariate effects. Events in period t depend on the
// covariates of period t-1, matching how designs read covariates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcast/covariates.hpp"
#include "netcast/csv.hpp"
#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

struct SyntheticSpec {
  int nodes = 20;
  Period first_period = 1970;
  int periods = 30;
  int blocks = 2;
  double within_block_effect = 0.0;  ///< log-odds added when both endpoints share a block
  double persistence = 0.0;          ///< P(edge at t | edge at t-1)
  double base_rate = 0.05;           ///< intercept is logit(base_rate)
  double initial_density = -1.0;     ///< first-period edge probability; negative: use the model
  std::map<std::string, double> covariate_effects;  ///< per standardized canonical covariate
  int late_entrants = 0;             ///< nodes whose registry span starts mid-panel
  double rate_low = 0.0;             ///< accepted band for the overall positive rate
  double rate_high = 1.0;
  int max_attempts = 20;
  std::uint64_t seed = 1;
};

struct SyntheticTruth {
  std::vector<int> block;  ///< per node, in id order
  double intercept = 0.0;
  double within_block_effect = 0.0;
  double persistence = 0.0;
  std::map<std::string, double> effects;
  std::map<std::string, std::pair<double, double>> standardization;  ///< mean, sd
  double positive_rate = 0.0;
  int attempts = 0;
};

struct SyntheticData {
  std::vector<RawEvent> events;
  std::map<NodeId, Span> registry;
  EventPanel panel;
  CovariateTable covariates;
  SyntheticTruth truth;
};

inline nlohmann::json to_json(const SyntheticSpec& s) {
  return {{"nodes", s.nodes},
          {"first_period", s.first_period},
          {"periods", s.periods},
          {"blocks", s.blocks},
          {"within_block_effect", s.within_block_effect},
          {"persistence", s.persistence},
          {"base_rate", s.base_rate},
          {"initial_density", s.initial_density},
          {"covariate_effects", s.covariate_effects},
          {"late_entrants", s.late_entrants},
          {"rate_low", s.rate_low},
          {"rate_high", s.rate_high},
          {"max_attempts", s.max_attempts},
          {"seed", s.seed}};
}

inline SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s;
  try {
    s.nodes = j.value("nodes", s.nodes);
    s.first_period = j.value("first_period", s.first_period);
    s.periods = j.value("periods", s.periods);
    s.blocks = j.value("blocks", s.blocks);
    s.within_block_effect = j.value("within_block_effect", s.within_block_effect);
    s.persistence = j.value("persistence", s.persistence);
    s.base_rate = j.value("base_rate", s.base_rate);
    s.initial_density = j.value("initial_density", s.initial_density);
    if (j.contains("covariate_effects")) s.covariate_effects = j["covariate_effects"].get<std::map<std::string, double>>();
    s.late_entrants = j.value("late_entrants", s.late_entrants);
    s.rate_low = j.value("rate_low", s.rate_low);
    s.rate_high = j.value("rate_high", s.rate_high);
    s.max_attempts = j.value("max_attempts", s.max_attempts);
    s.seed = j.value("seed", s.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

inline nlohmann::json to_json(const SyntheticTruth& t) {
  nlohmann::json st = nlohmann::json::object();
  for (const auto& [k, v] : t.standardization) st[k] = {{"mean", v.first}, {"sd", v.second}};
  return {{"block", t.block},
          {"intercept", t.intercept},
          {"within_block_effect", t.within_block_effect},
          {"persistence", t.persistence},
          {"effects", t.effects},
          {"standardization", st},
          {"positive_rate", t.positive_rate},
          {"attempts", t.attempts}};
}

namespace detail {

inline void validate(const SyntheticSpec& s) {
  if (s.nodes < 2) throw ArgumentError("synthetic spec needs at least 2 nodes");
  if (s.periods < 1) throw ArgumentError("synthetic spec needs at least 1 period");
  if (s.blocks < 1 || s.blocks > s.nodes) throw ArgumentError("blocks must lie in [1, nodes]");
  if (!(s.persistence >= 0.0 && s.persistence <= 1.0)) throw ArgumentError("persistence outside [0,1]");
  if (!(s.base_rate >= 0.0 && s.base_rate < 1.0)) throw ArgumentError("base_rate outside [0,1)");
  if (s.initial_density > 1.0) throw ArgumentError("initial_density above 1");
  if (s.late_entrants < 0 || s.late_entrants >= s.nodes) throw ArgumentError("late_entrants outside [0, nodes)");
  if (!(s.rate_low <= s.rate_high)) throw ArgumentError("empty positive-rate band");
  if (s.max_attempts < 1) throw ArgumentError("max_attempts must be >= 1");
  for (const auto& [name, _] : s.covariate_effects) {
    const auto& c = canonical_covariates();
    if (std::none_of(c.begin(), c.end(), [&name](const CovariateInfo& i) { return i.name == name; }))
      throw ArgumentError("covariate effect for unknown covariate '" + name + "'");
  }
}

inline std::string node_name(int k, int n) {
  const int width = static_cast<int>(std::to_string(n - 1).size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "N%0*d", width, k);
  return buf;
}

}  // namespace detail

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  detail::validate(spec);
  const int n = spec.nodes;
  const int P = spec.periods;
  const Period p0 = spec.first_period;
  const auto& canon = canonical_covariates();
  const std::size_t C = canon.size();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticData out;
  std::vector<std::string> ids(static_cast<std::size_t>(n));
  std::vector<Span> spans(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    ids[static_cast<std::size_t>(k)] = detail::node_name(k, n);
    const bool late = k >= n - spec.late_entrants;
    spans[static_cast<std::size_t>(k)] = Span{late ? p0 + P / 2 : p0, p0 + P - 1};
    out.registry[ids[static_cast<std::size_t>(k)]] = spans[static_cast<std::size_t>(k)];
  }
  auto active = [&](int k, Period p) { return spans[static_cast<std::size_t>(k)].covers(p); };

  SyntheticTruth truth;
  truth.block.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) truth.block[static_cast<std::size_t>(k)] = k % spec.blocks;
  truth.intercept = spec.base_rate > 0.0 ? std::log(spec.base_rate / (1.0 - spec.base_rate)) : -INFINITY;
  truth.within_block_effect = spec.within_block_effect;
  truth.persistence = spec.persistence;
  truth.effects = spec.covariate_effects;

  // cov[c][p][i*n+j]; values exist only where both nodes are active.
  using Slab = std::vector<double>;
  std::vector<std::vector<Slab>> cov;
  std::vector<std::vector<std::vector<char>>> edges;
  const auto at = [n](int i, int j) { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j); };

  for (int attempt = 1; attempt <= spec.max_attempts; ++attempt) {
    // Node attributes.
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n)), cap(static_cast<std::size_t>(n));
    std::vector<int> demo(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      x[static_cast<std::size_t>(k)] = 10.0 * unif(rng);
      y[static_cast<std::size_t>(k)] = 10.0 * unif(rng);
      cap[static_cast<std::size_t>(k)] = normal(rng);
      demo[static_cast<std::size_t>(k)] = unif(rng) < 0.5;
    }
    const int majors = std::max(1, n / 8);
    std::vector<double> alliance(at(n - 1, n - 1) + 1, 0.0), igo(alliance.size(), 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const bool same = truth.block[static_cast<std::size_t>(i)] == truth.block[static_cast<std::size_t>(j)];
        alliance[at(i, j)] = alliance[at(j, i)] = unif(rng) < (same ? 0.3 : 0.05);
        igo[at(i, j)] = igo[at(j, i)] = std::floor(10.0 + 30.0 * unif(rng));
      }

    cov.assign(C, std::vector<Slab>(static_cast<std::size_t>(P), Slab(alliance.size(), NAN)));
    for (int t = 0; t < P; ++t) {
      if (t > 0)
        for (int k = 0; k < n; ++k) {
          cap[static_cast<std::size_t>(k)] += 0.1 * normal(rng);
          if (unif(rng) < 0.1) demo[static_cast<std::size_t>(k)] ^= 1;
        }
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
          const double dist = std::hypot(x[si] - x[sj], y[si] - y[sj]);
          const double trade = std::exp(-2.0 + normal(rng));
          const double igo_t = igo[at(i, j)] + std::floor(5.0 * unif(rng)) - 2.0;
          const double war = unif(rng) < 0.05 ? 1.0 : 0.0;
          const double v[] = {
              static_cast<double>(demo[si] && demo[sj]),
              trade,
              igo_t,
              std::exp(std::abs(cap[si] - cap[sj])),
              dist,
              static_cast<double>(i < majors || j < majors),
              alliance[at(i, j)],
              dist < 2.5 ? 1.0 : 0.0,
              war,
          };
          if (!active(i, p0 + t) || !active(j, p0 + t)) continue;
          for (std::size_t c = 0; c < C; ++c)
            cov[c][static_cast<std::size_t>(t)][at(i, j)] = cov[c][static_cast<std::size_t>(t)][at(j, i)] = v[c];
        }
    }

    // Standardization over every observed (period, ordered dyad).
    std::vector<double> mu(C, 0.0), sd(C, 1.0);
    for (std::size_t c = 0; c < C; ++c) {
      double s = 0.0, s2 = 0.0;
      std::size_t m = 0;
      for (const auto& slab : cov[c])
        for (double v : slab)
          if (!std::isnan(v)) {
            s += v;
            s2 += v * v;
            ++m;
          }
      if (m > 1) {
        mu[c] = s / static_cast<double>(m);
        const double var = (s2 - static_cast<double>(m) * mu[c] * mu[c]) / static_cast<double>(m - 1);
        sd[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
      }
    }

    auto prob_new = [&](int i, int j, int t) {
      if (spec.base_rate <= 0.0) return 0.0;
      double eta = truth.intercept;
      if (truth.block[static_cast<std::size_t>(i)] == truth.block[static_cast<std::size_t>(j)])
        eta += spec.within_block_effect;
      if (t > 0)
        for (std::size_t c = 0; c < C; ++c) {
          auto e = spec.covariate_effects.find(canon[c].name);
          if (e == spec.covariate_effects.end() || e->second == 0.0) continue;
          eta += e->second * (cov[c][static_cast<std::size_t>(t - 1)][at(i, j)] - mu[c]) / sd[c];
        }
      return 1.0 / (1.0 + std::exp(-eta));
    };

    edges.assign(static_cast<std::size_t>(P), std::vector<std::vector<char>>(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0)));
    std::size_t positives = 0, possible = 0;
    for (int t = 0; t < P; ++t) {
      auto& cur = edges[static_cast<std::size_t>(t)];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j || !active(i, p0 + t) || !active(j, p0 + t)) continue;
          ++possible;
          bool e;
          if (t == 0 && spec.initial_density >= 0.0) {
            e = unif(rng) < spec.initial_density;
          } else if (t > 0 && edges[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
                     unif(rng) < spec.persistence) {
            e = true;
          } else {
            e = unif(rng) < prob_new(i, j, t);
          }
          cur[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e;
          positives += e;
        }
    }
    truth.positive_rate = possible ? static_cast<double>(positives) / static_cast<double>(possible) : 0.0;
    truth.attempts = attempt;
    if (truth.positive_rate < spec.rate_low || truth.positive_rate > spec.rate_high) continue;

    for (std::size_t c = 0; c < C; ++c) truth.standardization[canon[c].name] = {mu[c], sd[c]};
    for (int t = 0; t < P; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (edges[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
            out.events.push_back({ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)], p0 + t});
    for (int t = 0; t < P; ++t)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          for (std::size_t c = 0; c < C; ++c) {
            const double v = cov[c][static_cast<std::size_t>(t)][at(i, j)];
            if (!std::isnan(v))
              out.covariates.set(p0 + t, ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)], canon[c].name, v);
          }
        }
    out.panel = EventPanel::create(out.events, out.registry);
    out.truth = std::move(truth);
    return out;
  }
  throw GenerationError("positive rate " + std::to_string(truth.positive_rate) + " outside [" +
                        std::to_string(spec.rate_low) + ", " + std::to_string(spec.rate_high) + "] after " +
                        std::to_string(spec.max_attempts) + " attempts");
}

/// Writes events.csv, registry.csv, covariates.csv and truth.json.
inline void write_synthetic(const SyntheticData& d, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&dir](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw ArgumentError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("events.csv");
    f << "sender,receiver,year\n";
    for (const auto& e : d.events) f << e.sender << ',' << e.receiver << ',' << e.period << '\n';
  }
  {
    auto f = open("registry.csv");
    f << "node,first_year,last_year\n";
    for (const auto& [id, s] : d.registry) f << id << ',' << s.first << ',' << s.last << '\n';
  }
  {
    auto f = open("covariates.csv");
    d.covariates.write_csv(f);
  }
  {
    auto f = open("truth.json");
    f << to_json(d.truth).dump(2) << '\n';
  }
}

}  // namespace netcast
