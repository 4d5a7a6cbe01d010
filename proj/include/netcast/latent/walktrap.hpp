#pragma once

// Walktrap community detection: agglomerative merging of adjacent
// communities by random-walk distance, cut at maximum modularity.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

struct CommunityMerge {
  int left = 0;     ///< community label merged (smaller label)
  int right = 0;    ///< community label merged (larger label)
  int merged = 0;   ///< label of the new community
  double distance = 0.0;
  double modularity = 0.0;  ///< modularity after this merge
};

struct CommunityPartition {
  std::vector<int> nodes;               ///< panel node indices, ascending
  std::vector<int> labels;              ///< community label per entry of `nodes`
  double modularity = 0.0;
  std::vector<CommunityMerge> dendrogram;
  int community_count = 0;

  std::optional<int> label_of(int node) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
    if (it == nodes.end() || *it != node) return std::nullopt;
    return labels[static_cast<std::size_t>(it - nodes.begin())];
  }
};

namespace detail {

/// Undirected simple graph over local indices 0..n-1.
struct UndirectedGraph {
  int n = 0;
  std::vector<std::vector<int>> adj;  // sorted, no self loops
  std::size_t edge_count = 0;
};

inline UndirectedGraph symmetrize(const LaggedNetwork& net) {
  UndirectedGraph g;
  g.n = static_cast<int>(net.nodes.size());
  g.adj.assign(net.nodes.size(), {});
  auto local = [&net](int v) {
    return static_cast<int>(std::lower_bound(net.nodes.begin(), net.nodes.end(), v) - net.nodes.begin());
  };
  for (const auto& e : net.edges) {
    if (!net.contains(e.sender) || !net.contains(e.receiver)) continue;
    int a = local(e.sender), b = local(e.receiver);
    g.adj[static_cast<std::size_t>(a)].push_back(b);
    g.adj[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : g.adj) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    g.edge_count += nb.size();
  }
  g.edge_count /= 2;
  return g;
}

}  // namespace detail

/// Newman modularity of a labelling on the symmetrized, binarized graph.
/// Zero for a graph without edges.
inline double modularity(const LaggedNetwork& net, const std::vector<int>& labels) {
  auto g = detail::symmetrize(net);
  if (labels.size() != static_cast<std::size_t>(g.n)) throw ArgumentError("label count differs from node count");
  if (g.edge_count == 0) return 0.0;
  std::map<int, double> inside, degree;
  for (int v = 0; v < g.n; ++v) {
    int c = labels[static_cast<std::size_t>(v)];
    degree[c] += static_cast<double>(g.adj[static_cast<std::size_t>(v)].size());
    for (int w : g.adj[static_cast<std::size_t>(v)])
      if (w > v && labels[static_cast<std::size_t>(w)] == c) inside[c] += 1.0;
  }
  const double m = static_cast<double>(g.edge_count);
  double q = 0.0;
  for (const auto& [c, d] : degree) q += inside[c] / m - (d / (2.0 * m)) * (d / (2.0 * m));
  return q;
}

/// Runs walktrap on the symmetrized network. Every node carries a self-loop
/// for the walk, as in the original formulation. Merge ties go to the pair
/// with the smallest (min label, max label); initial labels follow panel
/// node order, merged communities take labels n, n+1, ...
inline CommunityPartition walktrap(const LaggedNetwork& net, int walk_length = 4) {
  if (net.nodes.empty()) throw ArgumentError("walktrap on an empty node set");
  if (walk_length < 1) throw ArgumentError("walk length must be >= 1");
  const auto g = detail::symmetrize(net);
  const int n = g.n;

  Eigen::VectorXd deg(n);
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    const auto& nb = g.adj[static_cast<std::size_t>(v)];
    deg(v) = static_cast<double>(nb.size()) + 1.0;
    step(v, v) = 1.0 / deg(v);
    for (int w : nb) step(v, w) = 1.0 / deg(v);
  }
  Eigen::MatrixXd walk = Eigen::MatrixXd::Identity(n, n);
  for (int t = 0; t < walk_length; ++t) walk = walk * step;
  // Row-scale by D^{-1/2} so squared Euclidean distance is the walktrap r^2.
  const Eigen::VectorXd inv_sqrt_deg = deg.cwiseSqrt().cwiseInverse();
  walk = walk * inv_sqrt_deg.asDiagonal();

  struct Community {
    Eigen::VectorXd profile;
    int size = 0;
    std::set<int> neighbors;
    bool alive = true;
  };
  std::vector<Community> comm;
  comm.reserve(static_cast<std::size_t>(2 * n));
  for (int v = 0; v < n; ++v) {
    Community c;
    c.profile = walk.row(v).transpose();
    c.size = 1;
    c.neighbors.insert(g.adj[static_cast<std::size_t>(v)].begin(), g.adj[static_cast<std::size_t>(v)].end());
    comm.push_back(std::move(c));
  }

  auto sigma = [&comm, n](int a, int b) {
    const auto& ca = comm[static_cast<std::size_t>(a)];
    const auto& cb = comm[static_cast<std::size_t>(b)];
    double r2 = (ca.profile - cb.profile).squaredNorm();
    double sa = ca.size, sb = cb.size;
    return (sa * sb / (sa + sb)) * r2 / static_cast<double>(n);
  };

  std::set<std::tuple<double, int, int>> queue;
  for (int v = 0; v < n; ++v)
    for (int w : g.adj[static_cast<std::size_t>(v)])
      if (v < w) queue.emplace(sigma(v, w), v, w);

  std::vector<CommunityMerge> merges;
  while (!queue.empty()) {
    auto [d, a, b] = *queue.begin();
    queue.erase(queue.begin());
    if (!comm[static_cast<std::size_t>(a)].alive || !comm[static_cast<std::size_t>(b)].alive) continue;
    const int c = static_cast<int>(comm.size());
    Community merged;
    auto& ca = comm[static_cast<std::size_t>(a)];
    auto& cb = comm[static_cast<std::size_t>(b)];
    merged.size = ca.size + cb.size;
    merged.profile = (ca.size * ca.profile + cb.size * cb.profile) / static_cast<double>(merged.size);
    merged.neighbors = ca.neighbors;
    merged.neighbors.insert(cb.neighbors.begin(), cb.neighbors.end());
    merged.neighbors.erase(a);
    merged.neighbors.erase(b);
    ca.alive = cb.alive = false;
    comm.push_back(std::move(merged));
    for (int nb : comm.back().neighbors) {
      auto& cn = comm[static_cast<std::size_t>(nb)];
      cn.neighbors.erase(a);
      cn.neighbors.erase(b);
      cn.neighbors.insert(c);
      queue.emplace(sigma(nb, c), std::min(nb, c), std::max(nb, c));
    }
    merges.push_back({a, b, c, d, 0.0});
  }

  // Replay merges, scoring each prefix; keep the earliest maximum.
  std::vector<int> owner(static_cast<std::size_t>(2 * n));
  std::iota(owner.begin(), owner.end(), 0);
  std::vector<int> current(static_cast<std::size_t>(n));
  std::iota(current.begin(), current.end(), 0);
  auto collapse = [&owner](int x) {
    while (owner[static_cast<std::size_t>(x)] != x) x = owner[static_cast<std::size_t>(x)];
    return x;
  };
  double best_q = modularity(net, current);
  std::size_t best_prefix = 0;
  for (std::size_t m = 0; m < merges.size(); ++m) {
    owner[static_cast<std::size_t>(merges[m].left)] = merges[m].merged;
    owner[static_cast<std::size_t>(merges[m].right)] = merges[m].merged;
    for (int v = 0; v < n; ++v) current[static_cast<std::size_t>(v)] = collapse(v);
    merges[m].modularity = modularity(net, current);
    if (merges[m].modularity > best_q + 1e-12) {
      best_q = merges[m].modularity;
      best_prefix = m + 1;
    }
  }

  std::iota(owner.begin(), owner.end(), 0);
  for (std::size_t m = 0; m < best_prefix; ++m) {
    owner[static_cast<std::size_t>(merges[m].left)] = merges[m].merged;
    owner[static_cast<std::size_t>(merges[m].right)] = merges[m].merged;
  }
  CommunityPartition out;
  out.nodes = net.nodes;
  out.labels.resize(static_cast<std::size_t>(n));
  std::map<int, int> relabel;  // first-seen order = order of smallest member
  for (int v = 0; v < n; ++v) {
    int root = collapse(v);
    auto [it, fresh] = relabel.try_emplace(root, static_cast<int>(relabel.size()));
    out.labels[static_cast<std::size_t>(v)] = it->second;
  }
  out.community_count = static_cast<int>(relabel.size());
  out.modularity = modularity(net, out.labels);
  out.dendrogram = std::move(merges);
  return out;
}

/// 1 when both nodes carry the same community label.
inline int common_community(const CommunityPartition& p, int i, int j) {
  auto a = p.label_of(i);
  auto b = p.label_of(j);
  if (!a || !b) throw ArgumentError("node not in community partition");
  return *a == *b ? 1 : 0;
}

}  // namespace netcast
