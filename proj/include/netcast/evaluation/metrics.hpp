#pragma once

// Contingency metrics, ROC and precision-recall curves.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "netcast/csv.hpp"
#include "netcast/errors.hpp"

namespace netcast {

struct ContingencyCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ContingencyCounts&, const ContingencyCounts&) = default;
};

/// Predicted positive iff score >= threshold.
inline ContingencyCounts contingency(std::span<const double> scores, std::span<const int> labels, double threshold) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("threshold outside [0,1]");
  ContingencyCounts c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct Metrics {
  double precision = 1.0;         ///< 1 when nothing is predicted positive
  std::optional<double> recall;   ///< undefined without actual positives
  std::optional<double> fpr;      ///< undefined without actual negatives
};

inline Metrics metrics(const ContingencyCounts& c) {
  Metrics m;
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (c.fp + c.tn > 0) m.fpr = static_cast<double>(c.fp) / static_cast<double>(c.fp + c.tn);
  return m;
}

enum class CurveKind { roc, pr };

struct Curve {
  CurveKind kind = CurveKind::roc;
  std::vector<std::pair<double, double>> points;  ///< (x, y)
  double auc = 0.0;

  void write_csv(std::ostream& out) const {
    out << "x,y\n";
    for (const auto& [x, y] : points) out << csv::format(x) << ',' << csv::format(y) << '\n';
  }
};

namespace detail {

/// Groups of tied scores in descending order: (positives, negatives) per group.
inline std::vector<std::pair<std::size_t, std::size_t>> tie_groups(std::span<const double> scores,
                                                                    std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || scores[order[k]] != scores[order[k - 1]]) groups.emplace_back(0, 0);
    if (labels[order[k]] != 0) ++groups.back().first;
    else ++groups.back().second;
  }
  return groups;
}

}  // namespace detail

/// ROC curve with one point per distinct score; AUC by the trapezoid rule,
/// which equals the Mann-Whitney statistic with ties counted as 1/2.
inline Curve roc_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto groups = detail::tie_groups(scores, labels);
  std::size_t pos = 0, neg = 0;
  for (const auto& [a, b] : groups) {
    pos += a;
    neg += b;
  }
  if (pos == 0 || neg == 0) throw EvalError("ROC needs at least one positive and one negative");
  Curve c;
  c.kind = CurveKind::roc;
  c.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0, fp = 0;
  double twice_area = 0.0;  // in units of (pair count)
  for (const auto& [a, b] : groups) {
    twice_area += static_cast<double>(b) * static_cast<double>(2 * tp + a);
    tp += a;
    fp += b;
    c.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos));
  }
  c.auc = twice_area / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return c;
}

/// Precision-recall curve with one point per distinct score, anchored at
/// (0, 1). The AUC is average precision: the mean over positives of the
/// precision at their rank. Within a group of tied scores, each position is
/// equally likely to hold any of the group's items, and the precision is
/// averaged over those arrangements.
inline Curve pr_curve(std::span<const double> scores, std::span<const int> labels) {
  const auto groups = detail::tie_groups(scores, labels);
  std::size_t pos = 0;
  for (const auto& g : groups) pos += g.first;
  if (pos == 0) throw EvalError("precision-recall needs at least one positive");
  Curve c;
  c.kind = CurveKind::pr;
  c.points.emplace_back(0.0, 1.0);
  std::size_t tp = 0, seen = 0;
  double sum = 0.0;
  for (const auto& [a, b] : groups) {
    const std::size_t n = a + b;
    if (a > 0) {
      // A positive at in-group position k has, in expectation,
      // (k-1)(a-1)/(n-1) positives ahead of it inside the group.
      const double share = static_cast<double>(a) / static_cast<double>(n);
      const double others = n > 1 ? static_cast<double>(a - 1) / static_cast<double>(n - 1) : 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double hits = static_cast<double>(tp) + 1.0 + static_cast<double>(k - 1) * others;
        sum += share * hits / static_cast<double>(seen + k);
      }
    }
    tp += a;
    seen += n;
    c.points.emplace_back(static_cast<double>(tp) / static_cast<double>(pos),
                          static_cast<double>(tp) / static_cast<double>(seen));
  }
  c.auc = sum / static_cast<double>(pos);
  return c;
}

inline double auc_roc(std::span<const double> scores, std::span<const int> labels) {
  return roc_curve(scores, labels).auc;
}

inline double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  return pr_curve(scores, labels).auc;
}

}  // namespace netcast
