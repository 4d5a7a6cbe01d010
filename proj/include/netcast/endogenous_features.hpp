#pragma once

// Dyadic statistics computed from the lagged outcome network alone.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

/// Out-, in- and undirected neighbor sets for every node of the panel universe.
class NeighborIndex {
 public:
  explicit NeighborIndex(const LaggedNetwork& net)
      : net_(&net), out_(net.universe), in_(net.universe), both_(net.universe) {
    for (const auto& e : net.edges) {
      check(e.sender);
      check(e.receiver);
      out_[idx(e.sender)].push_back(e.receiver);
      in_[idx(e.receiver)].push_back(e.sender);
    }
    for (std::size_t v = 0; v < net.universe; ++v) {
      auto& u = both_[v];
      std::set_union(out_[v].begin(), out_[v].end(), in_[v].begin(), in_[v].end(), std::back_inserter(u));
      std::sort(u.begin(), u.end());
      u.erase(std::unique(u.begin(), u.end()), u.end());
      u.erase(std::remove(u.begin(), u.end(), static_cast<int>(v)), u.end());
    }
  }

  const LaggedNetwork& network() const noexcept { return *net_; }
  const std::vector<int>& out(int v) const { return out_.at(idx(v)); }
  const std::vector<int>& in(int v) const { return in_.at(idx(v)); }
  const std::vector<int>& neighbors(int v) const { return both_.at(idx(v)); }
  std::size_t degree(int v) const { return neighbors(v).size(); }

 private:
  static std::size_t idx(int v) { return static_cast<std::size_t>(v); }
  void check(int v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= net_->universe) throw ArgumentError("node index out of range");
  }

  const LaggedNetwork* net_;
  std::vector<std::vector<int>> out_, in_, both_;
};

namespace detail {

inline void require_distinct(int i, int j) {
  if (i == j) throw ArgumentError("dyad statistic requested for i == j");
}

/// Members of n(i) ∩ n(j) and the size of n(i) ∪ n(j), both excluding i and j.
inline std::pair<std::vector<int>, std::size_t> shared_neighbors(const NeighborIndex& ix, int i, int j) {
  const auto& a = ix.neighbors(i);
  const auto& b = ix.neighbors(j);
  std::vector<int> common, all;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
  auto drop = [i, j](std::vector<int>& v) {
    v.erase(std::remove_if(v.begin(), v.end(), [i, j](int k) { return k == i || k == j; }), v.end());
  };
  drop(common);
  drop(all);
  return {std::move(common), all.size()};
}

}  // namespace detail

inline int memory(const NeighborIndex& ix, int i, int j) {
  detail::require_distinct(i, j);
  return ix.network().has_edge(i, j) ? 1 : 0;
}

/// Sender out-degree times receiver in-degree on the binary network. With
/// `exclude_focal`, an existing i→j edge is removed from both counts first.
inline long flow(const NeighborIndex& ix, int i, int j, bool exclude_focal = false) {
  detail::require_distinct(i, j);
  long sent = static_cast<long>(ix.out(i).size());
  long received = static_cast<long>(ix.in(j).size());
  if (exclude_focal && ix.network().has_edge(i, j)) {
    --sent;
    --received;
  }
  return sent * received;
}

inline long common_combatants(const NeighborIndex& ix, int i, int j) {
  detail::require_distinct(i, j);
  return static_cast<long>(detail::shared_neighbors(ix, i, j).first.size());
}

/// Sum over shared neighbors k of 1 / ln(deg k). A shared neighbor touches
/// both i and j, so its degree is at least 2.
inline double adamic_adar(const NeighborIndex& ix, int i, int j) {
  detail::require_distinct(i, j);
  double s = 0.0;
  for (int k : detail::shared_neighbors(ix, i, j).first) s += 1.0 / std::log(static_cast<double>(ix.degree(k)));
  return s;
}

/// |shared| / |union| over neighbor sets with i and j removed; 0 when the union is empty.
inline double jaccard(const NeighborIndex& ix, int i, int j) {
  detail::require_distinct(i, j);
  auto [common, union_size] = detail::shared_neighbors(ix, i, j);
  return union_size == 0 ? 0.0 : static_cast<double>(common.size()) / static_cast<double>(union_size);
}

// Convenience overloads for one-off queries against a network.
inline int memory(const LaggedNetwork& net, int i, int j) { return memory(NeighborIndex(net), i, j); }
inline long flow(const LaggedNetwork& net, int i, int j, bool exclude_focal = false) {
  return flow(NeighborIndex(net), i, j, exclude_focal);
}
inline long common_combatants(const LaggedNetwork& net, int i, int j) {
  return common_combatants(NeighborIndex(net), i, j);
}
inline double adamic_adar(const LaggedNetwork& net, int i, int j) { return adamic_adar(NeighborIndex(net), i, j); }
inline double jaccard(const LaggedNetwork& net, int i, int j) { return jaccard(NeighborIndex(net), i, j); }

/// Column names of the endogenous block, in design order.
inline const std::vector<std::string>& endogenous_feature_names() {
  static const std::vector<std::string> kNames{"memory",  "flow",             "common-combatants",
                                               "adamic-adar", "jaccard",      "common-community",
                                               "mmsbm-prob",  "latent-distance"};
  return kNames;
}

}  // namespace netcast
