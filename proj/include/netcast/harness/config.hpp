#pragma once

// Experiment configuration and its JSON form. Every field is optional in
// JSON; absent fields keep the defaults below.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netcast/covariates.hpp"
#include "netcast/design.hpp"
#include "netcast/errors.hpp"
#include "netcast/learners/tune.hpp"

namespace netcast {

struct DataPaths {
  std::string events;
  std::string registry;
  std::string covariates;
  std::vector<CovariateInfo> covariate_extensions;
};

struct ExperimentConfig {
  Period first_period = 1979;
  Period last_period = 2001;
  std::vector<int> lags{1, 5, 10};
  std::vector<SpecClass> specs{SpecClass::endogenous, SpecClass::covariates, SpecClass::combined};
  std::vector<LearnerKind> learners{LearnerKind::logit, LearnerKind::elastic_net, LearnerKind::logitboost,
                                    LearnerKind::neural_net};
  int training_depth = 1;
  std::uint64_t seed = 1;
  TuneConfig tuning;
  FeatureConfig features;
  int bootstrap_replicates = 10000;
  double bootstrap_level = 0.95;
  std::string output_dir = "netcast-out";
  bool dump_models = false;
  int threads = 1;
  DataPaths data;
};

inline nlohmann::json to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json specs = json::array(), learners = json::array(), ext = json::array();
  for (auto s : c.specs) specs.push_back(to_string(s));
  for (auto l : c.learners) learners.push_back(to_string(l));
  for (const auto& e : c.data.covariate_extensions) ext.push_back({{"name", e.name}, {"indicator", e.indicator}});
  const auto& g = c.tuning.grid;
  return json{
      {"first_period", c.first_period},
      {"last_period", c.last_period},
      {"lags", c.lags},
      {"specs", specs},
      {"learners", learners},
      {"training_depth", c.training_depth},
      {"seed", c.seed},
      {"tuning",
       {{"folds", c.tuning.folds},
        {"lambda", g.lambda},
        {"boost_iterations", g.boost_iterations},
        {"hidden", g.hidden},
        {"decay", g.decay},
        {"max_extensions", g.max_extensions},
        {"nn_max_iterations", c.tuning.neural_net.max_iterations},
        {"nn_restarts", c.tuning.neural_net.restarts}}},
      {"features",
       {{"covariates", c.features.covariates},
        {"covariate_timing",
         c.features.timing == CovariateTiming::previous_period ? "previous-period" : "window-mean"},
        {"flow_excludes_focal_edge", c.features.flow_excludes_focal_edge},
        {"max_missing_share", c.features.max_missing_share}}},
      {"latent",
       {{"walk_length", c.features.latent.walk_length},
        {"mmsbm_blocks", c.features.latent.mmsbm.blocks},
        {"mmsbm_restarts", c.features.latent.mmsbm.restarts},
        {"mmsbm_max_iterations", c.features.latent.mmsbm.max_iterations},
        {"latent_space_starts", c.features.latent.latent_space.starts},
        {"latent_space_max_iterations", c.features.latent.latent_space.max_iterations}}},
      {"bootstrap", {{"replicates", c.bootstrap_replicates}, {"level", c.bootstrap_level}}},
      {"output_dir", c.output_dir},
      {"dump_models", c.dump_models},
      {"threads", c.threads},
      {"data",
       {{"events", c.data.events},
        {"registry", c.data.registry},
        {"covariates", c.data.covariates},
        {"covariate_extensions", ext}}},
  };
}

namespace detail {
template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}
}  // namespace detail

/// Parses a config. Relative data paths and output_dir resolve against `base_dir`.
inline ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::read_if;
  static const std::vector<std::string> kKnown{"first_period", "last_period", "lags",     "specs",     "learners",
                                               "training_depth", "seed",      "tuning",   "features",  "latent",
                                               "bootstrap",    "output_dir",  "dump_models", "threads", "data"};
  for (const auto& [k, _] : j.items())
    if (std::find(kKnown.begin(), kKnown.end(), k) == kKnown.end()) throw ArgumentError("unknown config key '" + k + "'");

  ExperimentConfig c;
  try {
    read_if(j, "first_period", c.first_period);
    read_if(j, "last_period", c.last_period);
    read_if(j, "lags", c.lags);
    if (j.contains("specs")) {
      c.specs.clear();
      for (const auto& s : j["specs"]) c.specs.push_back(spec_class_from_string(s.get<std::string>()));
    }
    if (j.contains("learners")) {
      c.learners.clear();
      for (const auto& s : j["learners"]) c.learners.push_back(learner_kind_from_string(s.get<std::string>()));
    }
    read_if(j, "training_depth", c.training_depth);
    read_if(j, "seed", c.seed);
    if (j.contains("tuning")) {
      const auto& t = j["tuning"];
      read_if(t, "folds", c.tuning.folds);
      read_if(t, "lambda", c.tuning.grid.lambda);
      read_if(t, "boost_iterations", c.tuning.grid.boost_iterations);
      read_if(t, "hidden", c.tuning.grid.hidden);
      read_if(t, "decay", c.tuning.grid.decay);
      read_if(t, "max_extensions", c.tuning.grid.max_extensions);
      read_if(t, "nn_max_iterations", c.tuning.neural_net.max_iterations);
      read_if(t, "nn_restarts", c.tuning.neural_net.restarts);
    }
    if (j.contains("features")) {
      const auto& f = j["features"];
      read_if(f, "covariates", c.features.covariates);
      if (f.contains("covariate_timing")) {
        auto t = f["covariate_timing"].get<std::string>();
        if (t == "previous-period") c.features.timing = CovariateTiming::previous_period;
        else if (t == "window-mean") c.features.timing = CovariateTiming::window_mean;
        else throw ArgumentError("covariate_timing must be previous-period or window-mean");
      }
      read_if(f, "flow_excludes_focal_edge", c.features.flow_excludes_focal_edge);
      read_if(f, "max_missing_share", c.features.max_missing_share);
    }
    if (j.contains("latent")) {
      const auto& l = j["latent"];
      auto& lc = c.features.latent;
      read_if(l, "walk_length", lc.walk_length);
      read_if(l, "mmsbm_blocks", lc.mmsbm.blocks);
      read_if(l, "mmsbm_restarts", lc.mmsbm.restarts);
      read_if(l, "mmsbm_max_iterations", lc.mmsbm.max_iterations);
      read_if(l, "latent_space_starts", lc.latent_space.starts);
      read_if(l, "latent_space_max_iterations", lc.latent_space.max_iterations);
    }
    if (j.contains("bootstrap")) {
      read_if(j["bootstrap"], "replicates", c.bootstrap_replicates);
      read_if(j["bootstrap"], "level", c.bootstrap_level);
    }
    read_if(j, "output_dir", c.output_dir);
    read_if(j, "dump_models", c.dump_models);
    read_if(j, "threads", c.threads);
    if (j.contains("data")) {
      const auto& d = j["data"];
      read_if(d, "events", c.data.events);
      read_if(d, "registry", c.data.registry);
      read_if(d, "covariates", c.data.covariates);
      if (d.contains("covariate_extensions"))
        for (const auto& e : d["covariate_extensions"])
          c.data.covariate_extensions.push_back({e.at("name").get<std::string>(), e.value("indicator", false)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }

  auto resolve = [&base_dir](std::string& p) {
    if (!p.empty() && !base_dir.empty() && std::filesystem::path(p).is_relative()) p = (base_dir / p).string();
  };
  resolve(c.data.events);
  resolve(c.data.registry);
  resolve(c.data.covariates);
  resolve(c.output_dir);

  if (c.first_period > c.last_period) throw ArgumentError("first_period after last_period");
  if (c.lags.empty()) throw ArgumentError("no lag windows configured");
  for (int l : c.lags)
    if (l < 1) throw ArgumentError("lag windows must be >= 1");
  if (c.training_depth < 1) throw ArgumentError("training_depth must be >= 1");
  if (c.threads < 1) throw ArgumentError("threads must be >= 1");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace netcast
