#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "netcast/errors.hpp"

namespace netcast {

enum class LearnerKind { logit, elastic_net, logitboost, neural_net };

inline std::string to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::logit: return "logit";
    case LearnerKind::elastic_net: return "elastic-net";
    case LearnerKind::logitboost: return "logitboost";
    case LearnerKind::neural_net: return "neural-net";
  }
  return "?";
}

inline LearnerKind learner_kind_from_string(const std::string& s) {
  if (s == "logit") return LearnerKind::logit;
  if (s == "elastic-net" || s == "elastic_net" || s == "elasticnet") return LearnerKind::elastic_net;
  if (s == "logitboost" || s == "boost") return LearnerKind::logitboost;
  if (s == "neural-net" || s == "neural_net" || s == "nnet") return LearnerKind::neural_net;
  throw ArgumentError("unknown learner '" + s + "'");
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Column schema plus the standardization learned on the training rows.
/// Zero-variance columns are dropped and listed in `dropped`.
struct Schema {
  std::vector<std::string> names;   ///< every input column, in order
  std::vector<int> kept;            ///< indices into `names` that enter the model
  std::vector<double> mean, sd;     ///< per kept column
  std::vector<std::string> dropped;

  static Schema learn(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
    if (static_cast<std::size_t>(x.cols()) != names.size()) throw ArgumentError("feature name count differs from columns");
    Schema s;
    s.names = names;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!x.col(c).allFinite()) throw DataError("non-finite values in column '" + names[static_cast<std::size_t>(c)] + "'");
      double m = x.rows() > 0 ? x.col(c).mean() : 0.0;
      double var = x.rows() > 1 ? (x.col(c).array() - m).square().sum() / (n - 1.0) : 0.0;
      double sd = std::sqrt(var);
      if (sd <= 1e-12 * std::max(1.0, std::abs(m))) {
        s.dropped.push_back(names[static_cast<std::size_t>(c)]);
        continue;
      }
      s.kept.push_back(static_cast<int>(c));
      s.mean.push_back(m);
      s.sd.push_back(sd);
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x, const std::vector<std::string>& columns) const {
    if (columns != names) throw ArgumentError("feature schema mismatch");
    if (static_cast<std::size_t>(x.cols()) != names.size()) throw ArgumentError("feature column count mismatch");
    Eigen::MatrixXd z(x.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k)
      z.col(static_cast<Eigen::Index>(k)) = (x.col(kept[k]).array() - mean[k]) / sd[k];
    return z;
  }
};

/// Standardized training data.
struct TrainingSet {
  Schema schema;
  Eigen::MatrixXd z;   ///< rows x kept columns, standardized
  Eigen::VectorXd y;   ///< 0/1 labels

  static TrainingSet make(const Eigen::MatrixXd& x, const std::vector<int>& labels, const std::vector<std::string>& names) {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw ArgumentError("label count differs from rows");
    TrainingSet t;
    t.schema = Schema::learn(x, names);
    t.z = t.schema.apply(x, names);
    t.y.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] != 0 && labels[i] != 1) throw ArgumentError("labels must be 0 or 1");
      t.y(static_cast<Eigen::Index>(i)) = labels[i];
    }
    return t;
  }

  Eigen::Index positives() const { return static_cast<Eigen::Index>(y.sum()); }
  Eigen::Index rows() const { return y.size(); }
};

inline void require_both_classes(const Eigen::VectorXd& y) {
  const double pos = y.sum();
  if (pos < 1.0 || pos > static_cast<double>(y.size()) - 1.0)
    throw FitError("training labels need at least one positive and one negative");
}

struct LinearParams {
  double intercept = 0.0;
  Eigen::VectorXd coef;  ///< standardized scale, one per kept column
};

struct Stump {
  int feature = -1;        ///< kept-column index; -1 for a constant stump
  double threshold = 0.0;  ///< x <= threshold goes left
  double left = 0.0;
  double right = 0.0;
  double operator()(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    if (feature < 0) return left;
    return x(feature) <= threshold ? left : right;
  }
};

/// F(x) = base + 1/2 sum f_m(x); P(y=1) = 1/(1+exp(-2F)).
struct BoostParams {
  double base = 0.0;
  std::vector<Stump> stumps;
  std::vector<double> step_scale;  ///< 1 unless backtracking shrank that stump
  std::vector<double> loss;        ///< training loss after each stump (index 0 = base only)
};

struct NetParams {
  Eigen::MatrixXd w1;  ///< hidden x inputs
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;  ///< hidden
  double b2 = 0.0;
};

struct Convergence {
  bool converged = true;
  int iterations = 0;
  bool separation = false;  ///< coefficient cap hit
  std::string note;
};

struct FittedModel {
  LearnerKind kind = LearnerKind::logit;
  Schema schema;
  std::variant<LinearParams, BoostParams, NetParams> params;
  std::map<std::string, double> tuning;
  std::vector<std::string> grid_extensions;
  std::uint64_t seed = 0;
  Convergence convergence;

  const LinearParams* linear() const { return std::get_if<LinearParams>(&params); }

  /// Standardized-scale coefficient per input column; nullopt for dropped columns.
  std::map<std::string, std::optional<double>> coefficients() const {
    const auto* lin = linear();
    if (!lin) throw ArgumentError("coefficients only exist for linear learners");
    std::map<std::string, std::optional<double>> out;
    for (const auto& n : schema.names) out[n] = std::nullopt;
    for (std::size_t k = 0; k < schema.kept.size(); ++k)
      out[schema.names[static_cast<std::size_t>(schema.kept[k])]] = lin->coef(static_cast<Eigen::Index>(k));
    return out;
  }

  /// (intercept, per-kept-column slopes) on the raw feature scale.
  std::pair<double, Eigen::VectorXd> original_scale() const {
    const auto* lin = linear();
    if (!lin) throw ArgumentError("coefficients only exist for linear learners");
    Eigen::VectorXd b(lin->coef.size());
    double a = lin->intercept;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
      b(k) = lin->coef(k) / schema.sd[static_cast<std::size_t>(k)];
      a -= b(k) * schema.mean[static_cast<std::size_t>(k)];
    }
    return {a, b};
  }
};

inline Eigen::VectorXd predict_linear(const LinearParams& p, const Eigen::MatrixXd& z) {
  Eigen::VectorXd eta = (z * p.coef).array() + p.intercept;
  return eta.unaryExpr([](double e) { return logistic(e); });
}

inline Eigen::VectorXd boost_score(const BoostParams& p, const Eigen::MatrixXd& z, std::size_t stumps) {
  Eigen::VectorXd f = Eigen::VectorXd::Constant(z.rows(), p.base);
  for (std::size_t m = 0; m < stumps && m < p.stumps.size(); ++m)
    for (Eigen::Index r = 0; r < z.rows(); ++r) f(r) += 0.5 * p.step_scale[m] * p.stumps[m](z.row(r));
  return f;
}

inline Eigen::VectorXd predict_boost(const BoostParams& p, const Eigen::MatrixXd& z, std::size_t stumps) {
  return boost_score(p, z, stumps).unaryExpr([](double f) { return logistic(2.0 * f); });
}

inline Eigen::VectorXd predict_net(const NetParams& p, const Eigen::MatrixXd& z) {
  Eigen::MatrixXd h = ((z * p.w1.transpose()).rowwise() + p.b1.transpose()).unaryExpr([](double a) { return logistic(a); });
  Eigen::VectorXd out = (h * p.w2).array() + p.b2;
  return out.unaryExpr([](double a) { return logistic(a); });
}

/// Scores standardized rows.
inline Eigen::VectorXd predict_standardized(const FittedModel& m, const Eigen::MatrixXd& z) {
  if (static_cast<std::size_t>(z.cols()) != m.schema.kept.size()) throw ArgumentError("standardized column count mismatch");
  return std::visit(
      [&z](const auto& p) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) return predict_linear(p, z);
        else if constexpr (std::is_same_v<T, BoostParams>) return predict_boost(p, z, p.stumps.size());
        else return predict_net(p, z);
      },
      m.params);
}

/// Scores raw feature rows; the column names must equal the training schema.
inline Eigen::VectorXd predict(const FittedModel& m, const Eigen::MatrixXd& x, const std::vector<std::string>& columns) {
  return predict_standardized(m, m.schema.apply(x, columns));
}

inline nlohmann::json to_json(const FittedModel& m) {
  using nlohmann::json;
  json j;
  j["kind"] = to_string(m.kind);
  j["schema"] = {{"names", m.schema.names},
                 {"kept", m.schema.kept},
                 {"mean", m.schema.mean},
                 {"sd", m.schema.sd},
                 {"dropped", m.schema.dropped}};
  j["tuning"] = m.tuning;
  j["grid_extensions"] = m.grid_extensions;
  j["seed"] = m.seed;
  j["convergence"] = {{"converged", m.convergence.converged},
                      {"iterations", m.convergence.iterations},
                      {"separation", m.convergence.separation},
                      {"note", m.convergence.note}};
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LinearParams>) {
          j["parameters"] = {{"intercept", p.intercept}, {"coef", vec(p.coef)}};
        } else if constexpr (std::is_same_v<T, BoostParams>) {
          json stumps = json::array();
          for (std::size_t k = 0; k < p.stumps.size(); ++k) {
            const auto& s = p.stumps[k];
            stumps.push_back({{"feature", s.feature},
                              {"threshold", s.threshold},
                              {"left", s.left},
                              {"right", s.right},
                              {"scale", p.step_scale[k]}});
          }
          j["parameters"] = {{"base", p.base}, {"stumps", stumps}, {"loss", p.loss}};
        } else {
          json w1 = json::array();
          for (Eigen::Index r = 0; r < p.w1.rows(); ++r) w1.push_back(vec(p.w1.row(r).transpose()));
          j["parameters"] = {{"w1", w1}, {"b1", vec(p.b1)}, {"w2", vec(p.w2)}, {"b2", p.b2}};
        }
      },
      m.params);
  return j;
}

inline FittedModel model_from_json(const nlohmann::json& j) {
  FittedModel m;
  m.kind = learner_kind_from_string(j.at("kind").get<std::string>());
  const auto& s = j.at("schema");
  m.schema.names = s.at("names").get<std::vector<std::string>>();
  m.schema.kept = s.at("kept").get<std::vector<int>>();
  m.schema.mean = s.at("mean").get<std::vector<double>>();
  m.schema.sd = s.at("sd").get<std::vector<double>>();
  m.schema.dropped = s.at("dropped").get<std::vector<std::string>>();
  m.tuning = j.at("tuning").get<std::map<std::string, double>>();
  m.grid_extensions = j.at("grid_extensions").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  const auto& c = j.at("convergence");
  m.convergence = {c.at("converged").get<bool>(), c.at("iterations").get<int>(), c.at("separation").get<bool>(),
                   c.at("note").get<std::string>()};
  auto vec = [](const nlohmann::json& a) {
    auto v = a.get<std::vector<double>>();
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const auto& p = j.at("parameters");
  if (m.kind == LearnerKind::logit || m.kind == LearnerKind::elastic_net) {
    m.params = LinearParams{p.at("intercept").get<double>(), vec(p.at("coef"))};
  } else if (m.kind == LearnerKind::logitboost) {
    BoostParams b;
    b.base = p.at("base").get<double>();
    b.loss = p.at("loss").get<std::vector<double>>();
    for (const auto& st : p.at("stumps")) {
      b.stumps.push_back({st.at("feature").get<int>(), st.at("threshold").get<double>(), st.at("left").get<double>(),
                          st.at("right").get<double>()});
      b.step_scale.push_back(st.at("scale").get<double>());
    }
    m.params = std::move(b);
  } else {
    NetParams n;
    const auto& w1 = p.at("w1");
    const auto inputs = static_cast<Eigen::Index>(m.schema.kept.size());
    n.w1.resize(static_cast<Eigen::Index>(w1.size()), inputs);
    for (std::size_t r = 0; r < w1.size(); ++r) n.w1.row(static_cast<Eigen::Index>(r)) = vec(w1[r]).transpose();
    n.b1 = vec(p.at("b1"));
    n.w2 = vec(p.at("w2"));
    n.b2 = p.at("b2").get<double>();
    m.params = std::move(n);
  }
  return m;
}

}  // namespace netcast
