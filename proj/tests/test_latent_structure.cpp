#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace netcast;
using testing_support::network;

namespace {

std::vector<std::string> names(int n) {
  std::vector<std::string> out;
  for (int k = 0; k < n; ++k) out.push_back("n" + std::to_string(10 + k));
  return out;
}

/// Two cliques of sizes a and b joined by one edge between their first members.
LaggedNetwork bridged_cliques(int a, int b) {
  auto ids = names(a + b);
  std::vector<std::pair<std::string, std::string>> e;
  for (int i = 0; i < a; ++i)
    for (int j = i + 1; j < a; ++j) e.emplace_back(ids[i], ids[j]);
  for (int i = a; i < a + b; ++i)
    for (int j = i + 1; j < a + b; ++j) e.emplace_back(ids[i], ids[j]);
  e.emplace_back(ids[0], ids[a]);
  return network(ids, e);
}

std::vector<std::vector<int>> adjacency(const LaggedNetwork& net) {
  const auto n = net.nodes.size();
  std::vector<std::vector<int>> a(n, std::vector<int>(n, 0));
  auto loc = [&](int v) { return static_cast<std::size_t>(std::lower_bound(net.nodes.begin(), net.nodes.end(), v) - net.nodes.begin()); };
  for (const auto& e : net.edges) a[loc(e.sender)][loc(e.receiver)] = a[loc(e.receiver)][loc(e.sender)] = 1;
  return a;
}

std::vector<int> best_partition(const LaggedNetwork& net, double* best_q, int* ties) {
  auto a = adjacency(net);
  std::vector<int> best;
  *best_q = -1.0;
  *ties = 0;
  oracles::for_each_partition(static_cast<int>(a.size()), [&](const std::vector<int>& lab) {
    double q = oracles::modularity(a, lab);
    if (q > *best_q + 1e-12) {
      *best_q = q;
      best = lab;
      *ties = 1;
    } else if (std::abs(q - *best_q) <= 1e-12) {
      ++*ties;
    }
  });
  return best;
}

LaggedNetwork planted_blocks(int n, double pin, double pout, std::uint64_t seed, std::vector<int>* block = nullptr) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  auto ids = names(n);
  std::vector<std::pair<std::string, std::string>> e;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && u(rng) < ((i < n / 2) == (j < n / 2) ? pin : pout)) e.emplace_back(ids[i], ids[j]);
  if (block) {
    block->clear();
    for (int i = 0; i < n; ++i) block->push_back(i < n / 2 ? 0 : 1);
  }
  return network(ids, e);
}

}  // namespace

TEST(Walktrap, BridgedCliquesMatchExhaustiveModularity) {
  for (int a = 2; a <= 6; ++a)
    for (int b = 2; a + b <= 8; ++b) {
      auto net = bridged_cliques(a, b);
      double best_q = 0.0;
      int ties = 0;
      auto best = best_partition(net, &best_q, &ties);
      auto p = walktrap(net);
      EXPECT_NEAR(p.modularity, best_q, 1e-10) << a << "+" << b;
      if (ties == 1) EXPECT_EQ(oracles::canonical(p.labels), oracles::canonical(best)) << a << "+" << b;
    }
}

TEST(Walktrap, TwoTrianglesSplit) {
  auto net = bridged_cliques(3, 3);
  auto p = walktrap(net);
  EXPECT_EQ(p.community_count, 2);
  EXPECT_EQ(oracles::canonical(p.labels), (std::vector<int>{0, 0, 0, 1, 1, 1}));
  EXPECT_EQ(common_community(p, net.nodes[1], net.nodes[2]), 1);
  EXPECT_EQ(common_community(p, net.nodes[1], net.nodes[4]), 0);
}

TEST(Walktrap, DisconnectedEdges) {
  auto net = network({"A", "B", "C", "D"}, {{"A", "B"}, {"C", "D"}});
  auto p = walktrap(net);
  EXPECT_EQ(p.community_count, 2);
  EXPECT_EQ(oracles::canonical(p.labels), (std::vector<int>{0, 0, 1, 1}));
}

TEST(Walktrap, CompleteGraphSingleCommunity) {
  auto net = network({"A", "B", "C", "D"}, {{"A", "B"}, {"A", "C"}, {"A", "D"}, {"B", "C"}, {"B", "D"}, {"C", "D"}});
  auto p = walktrap(net);
  EXPECT_EQ(p.community_count, 1);
  double best_q = 0.0;
  int ties = 0;
  best_partition(net, &best_q, &ties);
  EXPECT_NEAR(p.modularity, best_q, 1e-12);
}

TEST(Walktrap, IsolatesAreSingletons) {
  auto net = network({"A", "B", "C", "D"}, {{"A", "B"}});
  auto p = walktrap(net);
  EXPECT_EQ(common_community(p, net.nodes[2], net.nodes[3]), 0);
  EXPECT_EQ(common_community(p, net.nodes[0], net.nodes[1]), 1);
}

TEST(Walktrap, PartitionInvariants) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto net = planted_blocks(14, 0.4, 0.05, s);
    auto p = walktrap(net);
    ASSERT_EQ(p.labels.size(), net.nodes.size());
    EXPECT_NEAR(p.modularity, modularity(net, p.labels), 1e-10);
    EXPECT_NEAR(p.modularity, oracles::modularity(adjacency(net), p.labels), 1e-10);
    std::set<int> distinct(p.labels.begin(), p.labels.end());
    EXPECT_EQ(static_cast<int>(distinct.size()), p.community_count);
  }
}

TEST(Walktrap, InputOrderInvariant) {
  std::vector<RawEvent> ev{{"A", "B", 1}, {"B", "C", 1}, {"C", "A", 1}, {"D", "E", 1}, {"E", "F", 1}, {"F", "D", 1}, {"C", "D", 1}};
  auto a = walktrap(aggregate_window(EventPanel::create(ev), 1, 1));
  std::reverse(ev.begin(), ev.end());
  std::rotate(ev.begin(), ev.begin() + 3, ev.end());
  auto b = walktrap(aggregate_window(EventPanel::create(ev), 1, 1));
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.modularity, b.modularity);
}

TEST(Walktrap, EmptyNodeSetRejected) {
  LaggedNetwork empty;
  EXPECT_THROW(walktrap(empty), ArgumentError);
}

TEST(Mmsbm, SingleBlockIsDensity) {
  auto net = planted_blocks(12, 0.5, 0.1, 3);
  MmsbmConfig cfg;
  cfg.blocks = 1;
  auto fit = fit_mmsbm(net, cfg, 1);
  const double n = static_cast<double>(net.nodes.size());
  const double density = static_cast<double>(net.edges.size()) / (n * (n - 1));
  for (int i : net.nodes)
    for (int j : net.nodes)
      if (i != j) EXPECT_NEAR(mmsbm_prob(fit, i, j), density, 1e-6);
}

TEST(Mmsbm, PlantedBlocksWithinExceedsBetween) {
  std::vector<int> block;
  auto net = planted_blocks(20, 0.8, 0.05, 11, &block);
  MmsbmConfig cfg;
  cfg.blocks = 2;
  auto fit = fit_mmsbm(net, cfg, 5);
  double within = 0, between = 0, nw = 0, nb = 0;
  for (std::size_t a = 0; a < net.nodes.size(); ++a)
    for (std::size_t b = 0; b < net.nodes.size(); ++b) {
      if (a == b) continue;
      double p = mmsbm_prob(fit, net.nodes[a], net.nodes[b]);
      if (block[a] == block[b]) {
        within += p;
        nw += 1;
      } else {
        between += p;
        nb += 1;
      }
    }
  EXPECT_GT(within / nw, between / nb);
  EXPECT_GT(within / nw, 0.6);
  EXPECT_LT(between / nb, 0.2);
}

TEST(Mmsbm, ObjectiveMonotoneAndSimplex) {
  auto net = planted_blocks(14, 0.6, 0.1, 2);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto fit = fit_mmsbm(net, {}, seed);
    for (std::size_t k = 1; k < fit.objective.size(); ++k)
      EXPECT_GE(fit.objective[k], fit.objective[k - 1] - 1e-8 * std::abs(fit.objective[k - 1]));
    for (Eigen::Index r = 0; r < fit.membership.rows(); ++r) {
      EXPECT_NEAR(fit.membership.row(r).sum(), 1.0, 1e-8);
      EXPECT_GE(fit.membership.row(r).minCoeff(), 0.0);
    }
    EXPECT_GE(fit.block_matrix.minCoeff(), 0.0);
    EXPECT_LE(fit.block_matrix.maxCoeff(), 1.0);
  }
}

TEST(Mmsbm, MembershipAlgebra) {
  MmsbmFit f;
  f.nodes = {0, 1, 2};
  f.blocks = 2;
  f.block_matrix.resize(2, 2);
  f.block_matrix << 0.9, 0.2, 0.3, 0.7;
  f.membership.resize(3, 2);
  f.membership << 1, 0, 0, 1, 0.5, 0.5;
  EXPECT_DOUBLE_EQ(mmsbm_prob(f, 0, 1), 0.2);
  EXPECT_DOUBLE_EQ(mmsbm_prob(f, 1, 0), 0.3);
  MmsbmFit u = f;
  u.membership << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  EXPECT_DOUBLE_EQ(mmsbm_prob(u, 0, 2), (0.9 + 0.2 + 0.3 + 0.7) / 4.0);
  EXPECT_THROW(mmsbm_prob(f, 1, 1), ArgumentError);
  EXPECT_THROW(mmsbm_prob(f, 0, 7), ArgumentError);
}

TEST(Mmsbm, Reproducible) {
  auto net = planted_blocks(12, 0.6, 0.1, 9);
  auto a = fit_mmsbm(net, {}, 4), b = fit_mmsbm(net, {}, 4);
  EXPECT_TRUE(a.membership.cwiseEqual(b.membership).all());
  EXPECT_TRUE(a.block_matrix.cwiseEqual(b.block_matrix).all());
}

namespace {

/// Points on a line, ties between points within `reach` of each other.
LaggedNetwork line_graph(int n, int reach, std::vector<double>* pos) {
  auto ids = names(n);
  std::vector<std::pair<std::string, std::string>> e;
  pos->clear();
  for (int i = 0; i < n; ++i) {
    pos->push_back(i);
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(i - j) <= reach) e.emplace_back(ids[i], ids[j]);
  }
  return network(ids, e);
}

}  // namespace

TEST(LatentSpace, RecoversLineGeometry) {
  std::vector<double> pos;
  auto net = line_graph(15, 2, &pos);
  auto fit = fit_latent_space(net, 3);
  std::vector<double> truth, fitted;
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = a + 1; b < pos.size(); ++b) {
      truth.push_back(std::abs(pos[a] - pos[b]));
      fitted.push_back(latent_distance(fit, net.nodes[a], net.nodes[b]));
    }
  EXPECT_GT(oracles::spearman(truth, fitted), 0.8);
  EXPECT_GE(fit.objective, fit.initial_objective);
}

TEST(LatentSpace, ReciprocalPairIsClose) {
  auto net = network({"A", "B", "C", "D", "E", "F"}, {{"A", "B"}, {"B", "A"}, {"C", "D"}, {"E", "C"}, {"D", "F"}});
  auto fit = fit_latent_space(net, 1);
  std::vector<double> others;
  for (int i : net.nodes)
    for (int j : net.nodes)
      if (i < j && !net.has_edge(i, j) && !net.has_edge(j, i)) others.push_back(latent_distance(fit, i, j));
  std::sort(others.begin(), others.end());
  const double median = others[others.size() / 2];
  EXPECT_LE(latent_distance(fit, net.nodes[0], net.nodes[1]), median);
}

TEST(LatentSpace, DistanceBasics) {
  LatentSpaceFit f;
  f.nodes = {0, 1, 2};
  f.positions.resize(3, 2);
  f.positions << 0, 0, 3, 4, 0, 0;
  EXPECT_DOUBLE_EQ(latent_distance(f, 0, 1), 5.0);
  EXPECT_DOUBLE_EQ(latent_distance(f, 1, 0), 5.0);
  EXPECT_DOUBLE_EQ(latent_distance(f, 0, 2), 0.0);
  EXPECT_THROW(latent_distance(f, 0, 9), ArgumentError);
}

TEST(LatentSpace, RotationLeavesDistances) {
  std::vector<double> pos;
  auto fit = fit_latent_space(line_graph(8, 1, &pos), 2);
  auto rotated = fit;
  const double th = 0.7;
  Eigen::Matrix2d r;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  rotated.positions = fit.positions * r.transpose();
  rotated.positions.rowwise() += Eigen::RowVector2d(3.0, -1.0);
  for (int i : fit.nodes)
    for (int j : fit.nodes) EXPECT_NEAR(latent_distance(fit, i, j), latent_distance(rotated, i, j), 1e-12);
}

TEST(LatentSpace, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(5, 5);
  y(0, 1) = y(1, 0) = y(2, 3) = y(3, 4) = 1;
  LatentSpaceConfig cfg;
  detail::LatentSpaceObjective obj(y, cfg);
  Eigen::MatrixXd z(5, 2);
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = u(rng);
  double alpha = 0.3, ga = 0;
  Eigen::MatrixXd gz;
  obj(z, alpha, &gz, &ga);
  const double h = 1e-6;
  for (Eigen::Index k = 0; k < z.size(); ++k) {
    Eigen::MatrixXd zp = z, zm = z;
    zp(k) += h;
    zm(k) -= h;
    EXPECT_NEAR(gz(k), (obj(zp, alpha) - obj(zm, alpha)) / (2 * h), 1e-6);
  }
  EXPECT_NEAR(ga, (obj(z, alpha + h) - obj(z, alpha - h)) / (2 * h), 1e-6);
}

TEST(LatentSpace, DegenerateGraphs) {
  auto empty = network({"A", "B", "C"}, {});
  auto fit = fit_latent_space(empty, 1);
  EXPECT_TRUE(fit.degenerate);
  for (int i : empty.nodes)
    for (int j : empty.nodes) EXPECT_TRUE(std::isfinite(latent_distance(fit, i, j)));
}

TEST(LatentStructure, BitReproducibleAndCached) {
  auto net = planted_blocks(12, 0.5, 0.1, 8);
  LatentConfig cfg;
  auto a = fit_latent_structure(net, cfg, 7);
  auto b = fit_latent_structure(net, cfg, 7);
  EXPECT_EQ(a.communities.labels, b.communities.labels);
  EXPECT_TRUE(a.latent_space.positions.cwiseEqual(b.latent_space.positions).all());
  ASSERT_TRUE(a.mmsbm && b.mmsbm);
  EXPECT_TRUE(a.mmsbm->membership.cwiseEqual(b.mmsbm->membership).all());

  LatentCache cache;
  auto c1 = cache.get(net, cfg, 7);
  auto c2 = cache.get(net, cfg, 7);
  EXPECT_EQ(c1.get(), c2.get());
  EXPECT_EQ(cache.size(), 1u);
}

TEST(LatentStructure, JsonRoundTripAndDiskCache) {
  auto net = planted_blocks(10, 0.5, 0.1, 2);
  auto fits = fit_latent_structure(net, {}, 3);
  auto back = latent_fits_from_json(to_json(fits, &net));
  EXPECT_EQ(back.communities.labels, fits.communities.labels);
  EXPECT_TRUE(back.latent_space.positions.isApprox(fits.latent_space.positions, 1e-15));

  auto dir = std::filesystem::temp_directory_path() / "netcast-cache-test";
  std::filesystem::remove_all(dir);
  {
    LatentCache c(dir);
    c.get(net, {}, 3);
  }
  EXPECT_FALSE(std::filesystem::is_empty(dir));
  LatentCache again(dir);
  auto loaded = again.get(net, {}, 3);
  EXPECT_EQ(loaded->communities.labels, fits.communities.labels);
  EXPECT_TRUE(loaded->latent_space.positions.isApprox(fits.latent_space.positions, 1e-15));
  std::filesystem::remove_all(dir);
}
