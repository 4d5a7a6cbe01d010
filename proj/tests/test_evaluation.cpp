#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "support.hpp"

using namespace netcast;

TEST(Contingency, Examples) {
  std::vector<double> s{0.9, 0.1};
  std::vector<int> y{1, 0};
  EXPECT_EQ(contingency(s, y, 0.5), (ContingencyCounts{1, 0, 0, 1}));
  auto all = contingency(s, y, 0.0);
  EXPECT_EQ(all.fn, 0u);
  EXPECT_EQ(all.tn, 0u);
  std::vector<double> low{0.9, 0.2, 0.4};
  std::vector<int> ly{1, 0, 1};
  auto none = contingency(low, ly, 1.0);
  EXPECT_EQ(none.tp + none.fp, 0u);
  EXPECT_EQ(none.total(), 3u);
  EXPECT_THROW(contingency(s, y, 1.01), ArgumentError);
  EXPECT_THROW(contingency(s, std::vector<int>{1}, 0.5), ArgumentError);
}

TEST(Metrics, Arithmetic) {
  auto m = metrics({1, 0, 1, 2});
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(*m.recall, 0.5);
  EXPECT_EQ(*m.fpr, 0.0);
  EXPECT_EQ(metrics({0, 0, 3, 2}).precision, 1.0);
  EXPECT_FALSE(metrics({2, 0, 1, 0}).fpr.has_value());
  EXPECT_FALSE(metrics({0, 2, 0, 1}).recall.has_value());
}

TEST(Curves, WorkedExample) {
  std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  std::vector<int> y{1, 0, 1, 0};
  EXPECT_DOUBLE_EQ(auc_roc(s, y), 0.75);
  EXPECT_DOUBLE_EQ(auc_pr(s, y), 5.0 / 6.0);
}

TEST(Curves, PerfectAndTied) {
  std::vector<double> s{0.9, 0.8, 0.3, 0.1};
  std::vector<int> y{1, 1, 0, 0};
  EXPECT_EQ(auc_roc(s, y), 1.0);
  EXPECT_EQ(auc_pr(s, y), 1.0);
  std::vector<double> flat(4, 0.3);
  EXPECT_EQ(auc_roc(flat, y), 0.5);
  // One tie group: expected precision of a random ordering.
  EXPECT_NEAR(auc_pr(flat, y), oracles::average_precision(flat, y), 1e-15);
  EXPECT_THROW(auc_roc(s, std::vector<int>{1, 1, 1, 1}), EvalError);
  EXPECT_THROW(auc_pr(s, std::vector<int>{0, 0, 0, 0}), EvalError);
}

TEST(Curves, ShapeInvariants) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
      s.push_back(std::round(u(rng) * 10) / 10);
      y.push_back(u(rng) < 0.3);
    }
    y[0] = 1;
    y[1] = 0;
    auto roc = roc_curve(s, y);
    EXPECT_EQ(roc.points.front(), (std::pair<double, double>{0.0, 0.0}));
    EXPECT_EQ(roc.points.back(), (std::pair<double, double>{1.0, 1.0}));
    auto pr = pr_curve(s, y);
    for (std::size_t k = 1; k < roc.points.size(); ++k) EXPECT_GE(roc.points[k].first, roc.points[k - 1].first);
    for (std::size_t k = 1; k < pr.points.size(); ++k) EXPECT_GE(pr.points[k].first, pr.points[k - 1].first);
    for (const auto& [x, yy] : pr.points) {
      EXPECT_GE(yy, 0.0);
      EXPECT_LE(yy, 1.0);
    }
  }
}

TEST(Curves, RandomOracleEquivalence) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 60);
    const int levels = 1 + static_cast<int>(rng() % 20);
    std::vector<double> s;
    std::vector<int> y;
    for (int i = 0; i < n; ++i) {
      s.push_back(std::floor(u(rng) * levels) / levels);
      y.push_back(u(rng) < 0.4);
    }
    y[0] = 1;
    y[1] = 0;
    EXPECT_NEAR(auc_roc(s, y), oracles::mann_whitney(s, y), 1e-12);
    // Small tie groups keep the permutation oracle tractable.
    std::vector<double> fine = s;
    for (auto& v : fine) v += static_cast<double>(rng() % 4) * 1e-3;
    EXPECT_NEAR(auc_pr(fine, y), oracles::average_precision(fine, y), 1e-12);
  }
}

TEST(Curves, MonotoneTransformAndLabelFlip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u;
  std::vector<double> s, t, neg;
  std::vector<int> y, flip;
  for (int i = 0; i < 100; ++i) {
    s.push_back(u(rng));
    t.push_back(std::exp(5 * s.back()) - 2);
    neg.push_back(-s.back());
    y.push_back(u(rng) < 0.2);
    flip.push_back(1 - y.back());
  }
  EXPECT_EQ(auc_roc(s, y), auc_roc(t, y));
  EXPECT_EQ(auc_pr(s, y), auc_pr(t, y));
  EXPECT_NEAR(auc_roc(neg, flip), auc_roc(s, y), 1e-12);
}

TEST(Curves, CsvOutput) {
  std::vector<double> s{0.9, 0.8};
  std::vector<int> y{1, 0};
  std::ostringstream out;
  roc_curve(s, y).write_csv(out);
  EXPECT_EQ(out.str(), "x,y\n0,0\n0,1\n1,1\n");
}

TEST(Bootstrap, ConstantValues) {
  std::vector<double> v(10, 0.3);
  auto [lo, hi] = bootstrap_ci(v, 1000, 1);
  EXPECT_EQ(lo, 0.3);
  EXPECT_EQ(hi, 0.3);
}

TEST(Bootstrap, TwoPoint) {
  std::vector<double> v{0.0, 1.0};
  auto [lo, hi] = bootstrap_ci(v, 2000, 1);
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, 1.0);
  EXPECT_LE(lo, 0.5);
  EXPECT_GE(hi, 0.5);
}

TEST(Bootstrap, MatchesIndependentResampler) {
  std::vector<double> v;
  for (int k = 1; k <= 23; ++k) v.push_back(k);
  auto [lo, hi] = bootstrap_ci(v, 20000, 42);
  // Second implementation: different generator, sort-free selection of order statistics.
  std::minstd_rand rng(99);
  std::vector<double> means;
  for (int r = 0; r < 20000; ++r) {
    double s = 0;
    for (std::size_t k = 0; k < v.size(); ++k) s += v[rng() % v.size()];
    means.push_back(s / static_cast<double>(v.size()));
  }
  auto q = [&](double p) {
    auto m = means;
    const double h = (m.size() - 1) * p;
    auto k = static_cast<std::size_t>(h);
    std::nth_element(m.begin(), m.begin() + static_cast<long>(k), m.end());
    double a = m[k];
    std::nth_element(m.begin(), m.begin() + static_cast<long>(k + 1), m.end());
    return a + (h - static_cast<double>(k)) * (m[k + 1] - a);
  };
  EXPECT_NEAR(lo / q(0.025), 1.0, 0.01);
  EXPECT_NEAR(hi / q(0.975), 1.0, 0.01);
  EXPECT_THROW(bootstrap_ci(std::vector<double>{1.0}), ArgumentError);
}

TEST(Bootstrap, Deterministic) {
  std::vector<double> v{0.1, 0.4, 0.2, 0.9, 0.5};
  EXPECT_EQ(bootstrap_ci(v, 500, 7), bootstrap_ci(v, 500, 7));
}

TEST(RollingMean, Examples) {
  auto r = rolling_mean({{1, 0.0}, {2, 3.0}, {3, 6.0}});
  EXPECT_EQ(r[0].second, 1.5);
  EXPECT_EQ(r[1].second, 3.0);
  EXPECT_EQ(r[2].second, 4.5);
  auto c = rolling_mean({{1, 2.0}, {2, 2.0}, {3, 2.0}, {4, 2.0}});
  for (const auto& [p, v] : c) EXPECT_EQ(v, 2.0);
  EXPECT_TRUE(rolling_mean({}).empty());
  EXPECT_THROW(rolling_mean({{1, 1.0}}, 2), ArgumentError);
}

TEST(CoefficientRatio, SelectionRule) {
  auto zero = coefficient_ratio("f", 0.0, 0.5);
  EXPECT_EQ(*zero.ratio, 0.0);
  EXPECT_FALSE(*zero.selected);
  auto same = coefficient_ratio("f", -0.8, -0.8);
  EXPECT_EQ(*same.ratio, 1.0);
  EXPECT_TRUE(*same.selected);
  auto undefined = coefficient_ratio("f", 0.3, 0.0);
  EXPECT_FALSE(undefined.ratio);
  EXPECT_FALSE(undefined.selected);
  EXPECT_TRUE(*coefficient_ratio("f", 0.01, 1.0).selected);
  EXPECT_FALSE(*coefficient_ratio("f", 0.0099, 1.0).selected);
}

TEST(CoefficientRatio, FromModels) {
  FittedModel en, lg;
  en.kind = LearnerKind::elastic_net;
  lg.kind = LearnerKind::logit;
  Schema s;
  s.names = {"a", "b", "c"};
  s.kept = {0, 2};
  s.mean = {0, 0};
  s.sd = {1, 1};
  s.dropped = {"b"};
  en.schema = lg.schema = s;
  en.params = LinearParams{0.0, Eigen::Vector2d(0.001, 0.4)};
  lg.params = LinearParams{0.0, Eigen::Vector2d(0.5, -0.8)};
  auto r = coefficient_ratio(en, lg);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(*r[0].ratio, 0.002);
  EXPECT_FALSE(*r[0].selected);
  EXPECT_FALSE(r[1].ratio);
  EXPECT_DOUBLE_EQ(*r[2].ratio, 0.5);
  EXPECT_TRUE(*r[2].selected);
}

TEST(RatioSeries, SmoothsPerFeatureOverPeriods) {
  // The window spans neighbouring periods; undefined ratios drop out of it.
  RatioSeries rs;
  rs.add(1, "endogenous", 2000, {coefficient_ratio("a", 0.0, 1.0), coefficient_ratio("b", 1.0, 1.0)});
  rs.add(1, "endogenous", 2001, {coefficient_ratio("a", 0.25, 1.0), coefficient_ratio("b", 1.0, 0.0)});
  rs.add(1, "endogenous", 2002, {coefficient_ratio("a", 0.5, 1.0), coefficient_ratio("b", 3.0, 1.0)});
  std::ostringstream out;
  rs.write_csv(out);
  EXPECT_EQ(out.str(),
            "lag,spec,period,feature,ratio,smoothed,selected\n"
            "1,endogenous,2000,a,0,0.125,0\n"
            "1,endogenous,2000,b,1,1,1\n"
            "1,endogenous,2001,a,0.25,0.25,1\n"
            "1,endogenous,2001,b,NA,NA,NA\n"
            "1,endogenous,2002,a,0.5,0.375,1\n"
            "1,endogenous,2002,b,3,3,1\n");
}
