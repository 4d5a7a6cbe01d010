#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace netcast;

namespace {

TrainingSet make_set(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < x.cols(); ++c) names.push_back("x" + std::to_string(c));
  return TrainingSet::make(x, y, names);
}

/// Noisy logistic data with a known slope.
TrainingSet noisy(int n, double b0, double b1, std::uint64_t seed, Eigen::MatrixXd* xout = nullptr,
                  std::vector<int>* yout = nullptr) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u;
  Eigen::MatrixXd x(n, 1);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    x(i, 0) = nd(rng);
    y.push_back(u(rng) < logistic(b0 + b1 * x(i, 0)) ? 1 : 0);
  }
  if (xout) *xout = x;
  if (yout) *yout = y;
  return make_set(x, y);
}

double raw_loglik(const Eigen::MatrixXd& x, const std::vector<int>& y, double a, double b) {
  double ll = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double e = a + b * x(i, 0);
    ll += y[static_cast<std::size_t>(i)] * e - std::log1p(std::exp(e));
  }
  return ll;
}

/// Zooming grid search over (a, b).
std::pair<double, double> grid_mle(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  double ca = 0, cb = 0, half = 5, step = 0.05;
  for (int round = 0; round < 5; ++round) {
    double best = -INFINITY, ba = ca, bb = cb;
    for (double a = ca - half; a <= ca + half + 1e-12; a += step)
      for (double b = cb - half; b <= cb + half + 1e-12; b += step) {
        double v = raw_loglik(x, y, a, b);
        if (v > best) {
          best = v;
          ba = a;
          bb = b;
        }
      }
    ca = ba;
    cb = bb;
    half = 2 * step;
    step /= 10;
  }
  return {ca, cb};
}

double accuracy(const Eigen::VectorXd& p, const Eigen::VectorXd& y) {
  double ok = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) ok += (p(i) >= 0.5) == (y(i) > 0.5);
  return ok / static_cast<double>(p.size());
}

}  // namespace

TEST(Schema, DropsConstantColumnsAndStandardizes) {
  Eigen::MatrixXd x(4, 3);
  x << 1, 5, 2, 2, 5, 4, 3, 5, 6, 4, 5, 8;
  auto t = TrainingSet::make(x, {0, 1, 0, 1}, {"a", "b", "c"});
  EXPECT_EQ(t.schema.dropped, (std::vector<std::string>{"b"}));
  EXPECT_EQ(t.z.cols(), 2);
  EXPECT_NEAR(t.z.col(0).mean(), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(t.z.col(0).squaredNorm() / 3.0), 1.0, 1e-12);
  Eigen::MatrixXd bad = x;
  bad(0, 0) = NAN;
  EXPECT_THROW(TrainingSet::make(bad, {0, 1, 0, 1}, {"a", "b", "c"}), DataError);
  EXPECT_THROW(t.schema.apply(x, {"a", "c", "b"}), ArgumentError);
}

TEST(Logit, InterceptOnlyAnalytic) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(4, 1);
  auto m = fit_logit(make_set(x, {1, 0, 0, 0}));
  EXPECT_NEAR(m.linear()->intercept, std::log(1.0 / 3.0), 1e-6);
  EXPECT_EQ(m.linear()->coef.size(), 0);
}

TEST(Logit, SymmetricDesign) {
  Eigen::MatrixXd x(4, 1);
  x << 0, 0, 1, 1;
  auto m = fit_logit(make_set(x, {0, 1, 0, 1}));
  EXPECT_NEAR(m.linear()->intercept, 0.0, 1e-8);
  EXPECT_NEAR(m.linear()->coef(0), 0.0, 1e-8);
}

TEST(Logit, MatchesGridOracle) {
  for (std::uint64_t s = 1; s <= 4; ++s) {
    Eigen::MatrixXd x;
    std::vector<int> y;
    auto t = noisy(60, -0.5, 1.2, s, &x, &y);
    auto m = fit_logit(t);
    auto [a, b] = m.original_scale();
    auto [ga, gb] = grid_mle(x, y);
    EXPECT_NEAR(a, ga, 1e-3);
    EXPECT_NEAR(b(0), gb, 1e-3);
    EXPECT_TRUE(m.convergence.converged);
  }
}

TEST(Logit, SeparationCapped) {
  Eigen::MatrixXd x(6, 1);
  x << 1, 2, 3, 4, 5, 6;
  auto m = fit_logit(make_set(x, {0, 0, 0, 1, 1, 1}));
  EXPECT_TRUE(m.convergence.separation);
  EXPECT_LE(std::abs(m.linear()->coef(0)), 30.0);
  auto p = predict(m, x, m.schema.names);
  EXPECT_TRUE(p.allFinite());
  EXPECT_LT(p(2), p(3));
}

TEST(Logit, SingleClassRejected) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  EXPECT_THROW(fit_logit(make_set(x, {0, 0, 0})), FitError);
}

TEST(ElasticNet, ZeroPenaltyIsLogit) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd x(80, 3);
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    for (int c = 0; c < 3; ++c) x(i, c) = nd(rng);
    y.push_back(nd(rng) < 0.8 * x(i, 0) - 0.5 * x(i, 1) ? 1 : 0);
  }
  auto t = make_set(x, y);
  auto lg = fit_logit(t);
  auto en = fit_elastic_net_fixed(t, 0.0);
  EXPECT_NEAR(en.linear()->intercept, lg.linear()->intercept, 1e-4);
  for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(en.linear()->coef(c), lg.linear()->coef(c), 1e-4);
}

TEST(ElasticNet, LargePenaltyZeroesSlopes) {
  auto t = noisy(50, 0.2, 2.0, 5);
  auto en = fit_elastic_net_fixed(t, 1e4);
  EXPECT_EQ(en.linear()->coef(0), 0.0);
  EXPECT_NEAR(en.linear()->intercept, std::log(t.y.mean() / (1 - t.y.mean())), 1e-6);
}

TEST(ElasticNet, MatchesProfileGridOracle) {
  auto t = noisy(70, -0.3, 1.0, 9);
  for (double lambda : {0.5, 2.0, 6.0}) {
    auto en = fit_elastic_net_fixed(t, lambda);
    // Profile out the intercept by Newton, then grid over the slope.
    auto profile = [&](double b) {
      double a = 0;
      for (int it = 0; it < 50; ++it) {
        double g = 0, h = 0;
        for (Eigen::Index i = 0; i < t.z.rows(); ++i) {
          double p = logistic(a + b * t.z(i, 0));
          g += t.y(i) - p;
          h += p * (1 - p);
        }
        a += g / h;
      }
      LinearParams p{a, Eigen::VectorXd::Constant(1, b)};
      return elastic_net_objective(t.z, t.y, p, lambda);
    };
    double c = 0, half = 3, step = 0.01;
    for (int round = 0; round < 4; ++round) {
      double best = INFINITY, bb = c;
      for (double b = c - half; b <= c + half + 1e-12; b += step) {
        double v = profile(b);
        if (v < best) {
          best = v;
          bb = b;
        }
      }
      c = bb;
      half = 2 * step;
      step /= 10;
    }
    EXPECT_NEAR(en.linear()->coef(0), c, 1e-3) << "lambda " << lambda;
  }
}

TEST(ElasticNet, PathShrinksMonotonically) {
  auto t = noisy(60, 0.0, 1.5, 12);
  double prev = INFINITY;
  for (double lambda : {0.0, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0}) {
    double b = std::abs(fit_elastic_net_fixed(t, lambda).linear()->coef(0));
    EXPECT_LE(b, prev + 1e-9);
    prev = b;
  }
}

TEST(ElasticNet, SoftThreshold) {
  EXPECT_EQ(soft_threshold(3.0, 1.0), 2.0);
  EXPECT_EQ(soft_threshold(-3.0, 1.0), -2.0);
  EXPECT_EQ(soft_threshold(0.5, 1.0), 0.0);
}

TEST(LogitBoost, ThresholdDataFitsPerfectly) {
  Eigen::MatrixXd x(40, 2);
  std::vector<int> y;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = u(rng);
    x(i, 1) = u(rng);
    y.push_back(x(i, 0) > 0.6 ? 1 : 0);
  }
  auto t = make_set(x, y);
  TuneConfig cfg;
  auto m = fit_logitboost(t, cfg, 3);
  EXPECT_EQ(accuracy(predict(m, x, t.schema.names), t.y), 1.0);
}

TEST(LogitBoost, LossNonIncreasing) {
  Eigen::MatrixXd x;
  std::vector<int> y;
  auto t = noisy(120, -1.0, 1.0, 21, &x, &y);
  auto m = fit_logitboost_fixed(t, 100);
  const auto& loss = std::get<BoostParams>(m.params).loss;
  for (std::size_t k = 1; k < loss.size(); ++k) EXPECT_LE(loss[k], loss[k - 1]);
}

TEST(LogitBoost, EmptyEnsemblePredictsBaseRate) {
  auto t = noisy(50, 0.0, 1.0, 2);
  auto m = fit_logitboost_fixed(t, 0);
  auto p = predict_standardized(m, t.z);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p(i), t.y.mean(), 1e-12);
}

TEST(LogitBoost, XorReachesBestAdditiveAccuracy) {
  // An additive stump ensemble cannot separate balanced XOR; 3 of 4 cells is the ceiling.
  Eigen::MatrixXd x(40, 2);
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = i % 2;
    x(i, 1) = (i / 2) % 2;
    y.push_back((i % 2) ^ ((i / 2) % 2));
  }
  auto t = make_set(x, y);
  auto m = fit_logitboost_fixed(t, 200);
  EXPECT_LE(accuracy(predict(m, x, t.schema.names), t.y), 0.75);
}

TEST(NeuralNet, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd z(5, 3);
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = nd(rng);
  Eigen::VectorXd y(5);
  y << 1, 0, 0, 1, 0;
  for (int hidden : {1, 2, 4}) {
    NetLayout layout{3, hidden};
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd theta(layout.size());
      for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = nd(rng);
      Eigen::VectorXd grad;
      neural_net_objective(layout, theta, z, y, 0.3, &grad);
      for (Eigen::Index k = 0; k < theta.size(); ++k) {
        const double h = 1e-5;
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += h;
        tm(k) -= h;
        const double fd = (neural_net_objective(layout, tp, z, y, 0.3) - neural_net_objective(layout, tm, z, y, 0.3)) / (2 * h);
        EXPECT_LE(std::abs(grad(k) - fd), 1e-5 * std::max(1.0, std::abs(fd))) << k;
      }
    }
  }
}

TEST(NeuralNet, HeavyDecayCollapsesToBaseRate) {
  auto t = noisy(80, -0.5, 2.0, 4);
  auto m = fit_neural_net_fixed(t, 2, 1e6, 1);
  auto p = predict_standardized(m, t.z);
  EXPECT_LT(p.maxCoeff() - p.minCoeff(), 1e-3);
  EXPECT_NEAR(p.mean(), t.y.mean(), 1e-3);
}

TEST(NeuralNet, SeparableWithOneHiddenUnit) {
  Eigen::MatrixXd x(30, 1);
  std::vector<int> y;
  for (int i = 0; i < 30; ++i) {
    x(i, 0) = i;
    y.push_back(i >= 15 ? 1 : 0);
  }
  auto t = make_set(x, y);
  NeuralNetOptions opt;
  opt.max_iterations = 5000;
  auto m = fit_neural_net_fixed(t, 1, 1e-4, 2, opt);
  EXPECT_EQ(accuracy(predict_standardized(m, t.z), t.y), 1.0);
}

TEST(Tune, SinglePointGridReturnedDirectly) {
  auto t = noisy(40, 0, 1, 1);
  TuneConfig cfg;
  cfg.grid.lambda = {0.7};
  auto r = tune(LearnerKind::elastic_net, t, cfg, 1);
  EXPECT_EQ(r.values.at("lambda"), 0.7);
  EXPECT_EQ(r.folds, 0);
  EXPECT_TRUE(r.scores.empty());
}

TEST(Tune, InteriorOptimumSelected) {
  // Two informative features and many noise features: moderate lambda wins.
  std::mt19937_64 rng(17);
  std::normal_distribution<double> nd;
  const int n = 150, p = 30;
  Eigen::MatrixXd x(n, p);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < p; ++c) x(i, c) = nd(rng);
    y.push_back(std::uniform_real_distribution<double>()(rng) < logistic(-1.0 + 1.5 * x(i, 0) - 1.5 * x(i, 1)) ? 1 : 0);
  }
  auto t = make_set(x, y);
  TuneConfig cfg;
  cfg.grid.lambda = {0.01, 1.0, 1000.0};
  cfg.grid.max_extensions = 0;
  auto r = tune(LearnerKind::elastic_net, t, cfg, 4);
  EXPECT_EQ(r.values.at("lambda"), 1.0);
  EXPECT_GT(r.scores.at("lambda=1"), r.scores.at("lambda=1000"));
  EXPECT_GT(r.scores.at("lambda=1"), r.scores.at("lambda=0.01"));
}

TEST(Tune, BoundaryOptimumExtendsGrid) {
  // Pure signal: the smallest lambda is best, so the grid extends downward.
  Eigen::MatrixXd x;
  std::vector<int> y;
  auto t = noisy(120, 0.0, 3.0, 6, &x, &y);
  TuneConfig cfg;
  cfg.grid.lambda = {100.0, 300.0, 1000.0};
  auto r = tune(LearnerKind::elastic_net, t, cfg, 2);
  ASSERT_FALSE(r.extensions.empty());
  EXPECT_EQ(r.extensions.front().rfind("lambda:-", 0), 0u);
  EXPECT_LT(r.values.at("lambda"), 100.0);
  auto m = fit_elastic_net(t, cfg, 2);
  EXPECT_EQ(m.grid_extensions, r.extensions);
}

TEST(Tune, StratifiedFolds) {
  Eigen::VectorXd y(13);
  y << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0;
  int k = 0;
  auto f = stratified_folds(y, 5, 1, &k);
  EXPECT_EQ(k, 3);
  std::vector<int> pos(3, 0);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) > 0.5) ++pos[static_cast<std::size_t>(f[static_cast<std::size_t>(i)])];
  EXPECT_EQ(pos, (std::vector<int>{1, 1, 1}));
  Eigen::VectorXd one(4);
  one << 1, 0, 0, 0;
  EXPECT_THROW(stratified_folds(one, 5, 1), TuningError);
}

TEST(Predict, LinearBasics) {
  FittedModel m;
  m.kind = LearnerKind::logit;
  m.schema.names = {"a"};
  m.schema.kept = {0};
  m.schema.mean = {0.0};
  m.schema.sd = {1.0};
  m.params = LinearParams{0.0, Eigen::VectorXd::Zero(1)};
  Eigen::MatrixXd x(3, 1);
  x << -4, 0, 9;
  EXPECT_TRUE((predict(m, x, {"a"}).array() == 0.5).all());
  m.params = LinearParams{0.0, Eigen::VectorXd::Ones(1)};
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  EXPECT_EQ(predict(m, zero, {"a"})(0), 0.5);
}

class AllLearners : public ::testing::TestWithParam<LearnerKind> {};

TEST_P(AllLearners, RangeDeterminismAndAffineInvariance) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> nd;
  const int n = 90;
  Eigen::MatrixXd x(n, 3);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) x(i, c) = nd(rng);
    y.push_back(nd(rng) < x(i, 0) - 0.5 * x(i, 2) - 0.5 ? 1 : 0);
  }
  TuneConfig cfg;
  cfg.folds = 3;
  cfg.grid.hidden = {1, 2};
  cfg.grid.decay = {0.1, 1.0};
  cfg.grid.max_extensions = 1;
  cfg.neural_net.max_iterations = 300;
  const std::vector<std::string> names{"a", "b", "c"};
  auto t = TrainingSet::make(x, y, names);
  auto m1 = fit(GetParam(), t, cfg, 5);
  auto m2 = fit(GetParam(), t, cfg, 5);
  EXPECT_EQ(to_json(m1).dump(), to_json(m2).dump());

  Eigen::MatrixXd probe(200, 3);
  for (Eigen::Index k = 0; k < probe.size(); ++k) probe(k) = 3 * nd(rng);
  auto p = predict(m1, probe, names);
  EXPECT_TRUE(p.allFinite());
  EXPECT_GE(p.minCoeff(), 0.0);
  EXPECT_LE(p.maxCoeff(), 1.0);

  Eigen::MatrixXd scaled = x;
  scaled.col(0) = 7.0 * scaled.col(0).array() + 3.0;
  scaled.col(2) = 0.01 * scaled.col(2).array() - 40.0;
  auto ts = TrainingSet::make(scaled, y, names);
  auto ms = fit(GetParam(), ts, cfg, 5);
  Eigen::MatrixXd probe_scaled = probe;
  probe_scaled.col(0) = 7.0 * probe_scaled.col(0).array() + 3.0;
  probe_scaled.col(2) = 0.01 * probe_scaled.col(2).array() - 40.0;
  auto ps = predict(ms, probe_scaled, names);
  // Same ranking of scores.
  std::vector<Eigen::Index> a(200), b(200);
  std::iota(a.begin(), a.end(), 0);
  std::iota(b.begin(), b.end(), 0);
  std::stable_sort(a.begin(), a.end(), [&](auto i, auto j) { return p(i) > p(j); });
  std::stable_sort(b.begin(), b.end(), [&](auto i, auto j) { return ps(i) > ps(j); });
  EXPECT_EQ(a.front(), b.front());
  EXPECT_TRUE(p.isApprox(ps, 1e-6));

  auto back = model_from_json(to_json(m1));
  EXPECT_TRUE(predict(back, probe, names).isApprox(p, 1e-14));
}

INSTANTIATE_TEST_SUITE_P(Kinds, AllLearners,
                         ::testing::Values(LearnerKind::logit, LearnerKind::elastic_net, LearnerKind::logitboost,
                                           LearnerKind::neural_net),
                         [](const auto& info) {
                           auto s = to_string(info.param);
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });
