#pragma once

// The three structure fits computed per lagged network, a cache keyed by
// network content, and a JSON dump for inspection.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>

#include "netcast/latent/latent_space.hpp"
#include "netcast/latent/mmsbm.hpp"
#include "netcast/latent/walktrap.hpp"

namespace netcast {

struct LatentConfig {
  int walk_length = 4;
  MmsbmConfig mmsbm;
  LatentSpaceConfig latent_space;
};

struct LatentFits {
  CommunityPartition communities;
  std::optional<MmsbmFit> mmsbm;   ///< absent when the window has fewer nodes than blocks
  LatentSpaceFit latent_space;
};

/// Fits all three models. Seeds are derived from `seed` and the network
/// content, so the result depends only on (network, seed, config).
inline LatentFits fit_latent_structure(const LaggedNetwork& net, const LatentConfig& cfg, std::uint64_t seed) {
  LatentFits fits;
  fits.communities = walktrap(net, cfg.walk_length);
  const std::uint64_t base = seed ^ (net.content_hash() * 0x9E3779B97F4A7C15ULL);
  if (net.nodes.size() >= static_cast<std::size_t>(cfg.mmsbm.blocks))
    fits.mmsbm = fit_mmsbm(net, cfg.mmsbm, base + 1);
  fits.latent_space = fit_latent_space(net, base + 2, cfg.latent_space);
  return fits;
}

namespace detail {

inline nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  return m;
}

}  // namespace detail

/// Serializes fits. Node ids are included when the network carries them.
inline nlohmann::json to_json(const LatentFits& fits, const LaggedNetwork* net = nullptr) {
  nlohmann::json j;
  auto ids = nlohmann::json::array();
  if (net && net->ids)
    for (int v : fits.communities.nodes) ids.push_back((*net->ids)[static_cast<std::size_t>(v)]);
  j["node_ids"] = ids;
  j["partition"] = {{"nodes", fits.communities.nodes},
                    {"labels", fits.communities.labels},
                    {"modularity", fits.communities.modularity},
                    {"communities", fits.communities.community_count}};
  auto merges = nlohmann::json::array();
  for (const auto& m : fits.communities.dendrogram)
    merges.push_back({m.left, m.right, m.merged, m.distance, m.modularity});
  j["partition"]["dendrogram"] = merges;
  if (fits.mmsbm) {
    const auto& f = *fits.mmsbm;
    j["mmsbm"] = {{"nodes", f.nodes},
                  {"blocks", f.blocks},
                  {"membership", detail::matrix_json(f.membership)},
                  {"block_matrix", detail::matrix_json(f.block_matrix)},
                  {"objective", f.objective},
                  {"converged", f.converged},
                  {"iterations", f.iterations},
                  {"restart", f.restart}};
  }
  const auto& ls = fits.latent_space;
  j["latent_space"] = {{"nodes", ls.nodes},
                       {"positions", detail::matrix_json(ls.positions)},
                       {"intercept", ls.intercept},
                       {"objective", ls.objective},
                       {"initial_objective", ls.initial_objective},
                       {"iterations", ls.iterations},
                       {"converged", ls.converged},
                       {"degenerate", ls.degenerate},
                       {"start", ls.start}};
  return j;
}

inline LatentFits latent_fits_from_json(const nlohmann::json& j) {
  LatentFits f;
  const auto& p = j.at("partition");
  f.communities.nodes = p.at("nodes").get<std::vector<int>>();
  f.communities.labels = p.at("labels").get<std::vector<int>>();
  f.communities.modularity = p.at("modularity").get<double>();
  f.communities.community_count = p.at("communities").get<int>();
  for (const auto& m : p.at("dendrogram"))
    f.communities.dendrogram.push_back(
        {m[0].get<int>(), m[1].get<int>(), m[2].get<int>(), m[3].get<double>(), m[4].get<double>()});
  if (j.contains("mmsbm")) {
    const auto& m = j["mmsbm"];
    MmsbmFit fit;
    fit.nodes = m.at("nodes").get<std::vector<int>>();
    fit.blocks = m.at("blocks").get<int>();
    fit.membership = detail::matrix_from_json(m.at("membership"));
    fit.block_matrix = detail::matrix_from_json(m.at("block_matrix"));
    fit.objective = m.at("objective").get<std::vector<double>>();
    fit.converged = m.at("converged").get<bool>();
    fit.iterations = m.at("iterations").get<int>();
    fit.restart = m.at("restart").get<int>();
    f.mmsbm = std::move(fit);
  }
  const auto& l = j.at("latent_space");
  f.latent_space.nodes = l.at("nodes").get<std::vector<int>>();
  f.latent_space.positions = detail::matrix_from_json(l.at("positions"));
  if (f.latent_space.positions.size() == 0) f.latent_space.positions.resize(0, 2);
  f.latent_space.intercept = l.at("intercept").get<double>();
  f.latent_space.objective = l.at("objective").get<double>();
  f.latent_space.initial_objective = l.at("initial_objective").get<double>();
  f.latent_space.iterations = l.at("iterations").get<int>();
  f.latent_space.converged = l.at("converged").get<bool>();
  f.latent_space.degenerate = l.at("degenerate").get<bool>();
  f.latent_space.start = l.at("start").get<int>();
  return f;
}

/// Shared cache of latent fits keyed by (network content, seed, config).
/// Reads take a shared lock, inserts an exclusive one. When a directory is
/// given, entries are also persisted there as JSON.
class LatentCache {
 public:
  explicit LatentCache(std::filesystem::path directory = {}) : dir_(std::move(directory)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  /// Cache rooted at $NETCAST_CACHE_DIR, or memory-only when unset.
  static LatentCache from_environment() {
    const char* d = std::getenv("NETCAST_CACHE_DIR");
    return LatentCache(d && *d ? std::filesystem::path(d) : std::filesystem::path{});
  }

  std::shared_ptr<const LatentFits> get(const LaggedNetwork& net, const LatentConfig& cfg, std::uint64_t seed) {
    const std::string key = make_key(net, cfg, seed);
    {
      std::shared_lock lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    std::shared_ptr<const LatentFits> fits;
    if (!dir_.empty()) {
      std::ifstream in(dir_ / (key + ".json"));
      if (in) {
        try {
          fits = std::make_shared<const LatentFits>(latent_fits_from_json(nlohmann::json::parse(in)));
        } catch (const std::exception&) {
          fits.reset();  // unreadable entry: recompute
        }
      }
    }
    if (!fits) {
      fits = std::make_shared<const LatentFits>(fit_latent_structure(net, cfg, seed));
      if (!dir_.empty()) {
        std::ofstream out(dir_ / (key + ".json"));
        out << to_json(*fits, &net).dump();
      }
    }
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, fits).first->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

 private:
  static std::string make_key(const LaggedNetwork& net, const LatentConfig& cfg, std::uint64_t seed) {
    std::ostringstream s;
    s << std::hex << net.content_hash() << '-' << seed << '-' << std::dec << cfg.walk_length << '-'
      << cfg.mmsbm.blocks << '-' << cfg.mmsbm.restarts << '-' << cfg.mmsbm.max_iterations << '-'
      << cfg.latent_space.starts << '-' << cfg.latent_space.max_iterations;
    return s.str();
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const LatentFits>> entries_;
};

}  // namespace netcast
