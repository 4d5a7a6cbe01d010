#pragma once

// Coefficient-ratio importance diagnostic and rolling-mean smoothing.

#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "netcast/csv.hpp"
#include "netcast/errors.hpp"
#include "netcast/learners/model.hpp"
#include "netcast/panel.hpp"

namespace netcast {

inline constexpr double kSelectionThreshold = 0.01;
inline constexpr double kRatioDenominatorFloor = 1e-12;

/// Centered rolling mean over period-indexed values; a point's window holds
/// every entry within width/2 periods of it, truncated at the series ends.
inline std::vector<std::pair<Period, double>> rolling_mean(const std::vector<std::pair<Period, double>>& series,
                                                           int width = 3) {
  if (width < 1 || width % 2 == 0) throw ArgumentError("rolling window width must be odd and positive");
  const int half = width / 2;
  std::vector<std::pair<Period, double>> out;
  out.reserve(series.size());
  for (const auto& [p, _] : series) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [q, v] : series)
      if (q >= p - half && q <= p + half) {
        sum += v;
        ++n;
      }
    out.emplace_back(p, sum / n);
  }
  return out;
}

struct RatioEntry {
  std::string feature;
  std::optional<double> ratio;     ///< undefined when |logit beta| < 1e-12 or either side was dropped
  std::optional<bool> selected;    ///< ratio >= 0.01; undefined with the ratio
};

/// |elastic-net beta| / |logit beta| per feature, standardized scale.
inline std::vector<RatioEntry> coefficient_ratio(const FittedModel& en, const FittedModel& logit) {
  if (!en.linear() || !logit.linear()) throw ArgumentError("coefficient ratio needs two linear models");
  if (en.schema.names != logit.schema.names) throw ArgumentError("coefficient ratio: feature schema mismatch");
  const auto a = en.coefficients();
  const auto b = logit.coefficients();
  std::vector<RatioEntry> out;
  for (const auto& name : en.schema.names) {
    RatioEntry e{name, std::nullopt, std::nullopt};
    const auto& num = a.at(name);
    const auto& den = b.at(name);
    if (num && den && std::abs(*den) >= kRatioDenominatorFloor) {
      e.ratio = std::abs(*num) / std::abs(*den);
      e.selected = *e.ratio >= kSelectionThreshold;
    }
    out.push_back(std::move(e));
  }
  return out;
}

/// Builds a ratio entry from raw coefficients (for constructed cases and re-analysis).
inline RatioEntry coefficient_ratio(const std::string& feature, double en_beta, double logit_beta) {
  RatioEntry e{feature, std::nullopt, std::nullopt};
  if (std::abs(logit_beta) >= kRatioDenominatorFloor) {
    e.ratio = std::abs(en_beta) / std::abs(logit_beta);
    e.selected = *e.ratio >= kSelectionThreshold;
  }
  return e;
}

struct RatioPoint {
  int lag = 0;
  std::string spec;
  Period period = 0;
  std::string feature;
  std::optional<double> ratio;
  std::optional<double> smoothed;
  std::optional<bool> selected;
};

/// Per (lag, spec, feature) series over periods; smoothing skips undefined ratios.
class RatioSeries {
 public:
  void add(int lag, const std::string& spec, Period period, const std::vector<RatioEntry>& entries) {
    for (const auto& e : entries) points_.push_back({lag, spec, period, e.feature, e.ratio, std::nullopt, e.selected});
    smoothed_ = false;
  }

  const std::vector<RatioPoint>& points() {
    smooth();
    return points_;
  }

  void write_csv(std::ostream& out) {
    smooth();
    out << "lag,spec,period,feature,ratio,smoothed,selected\n";
    for (const auto& p : points_)
      out << p.lag << ',' << p.spec << ',' << p.period << ',' << p.feature << ',' << csv::format(p.ratio) << ','
          << csv::format(p.smoothed) << ',' << (p.selected ? (*p.selected ? "1" : "0") : "NA") << '\n';
  }

 private:
  void smooth() {
    if (smoothed_) return;
    std::sort(points_.begin(), points_.end(), [](const RatioPoint& a, const RatioPoint& b) {
      return std::tie(a.lag, a.spec, a.feature, a.period) < std::tie(b.lag, b.spec, b.feature, b.period);
    });
    std::size_t start = 0;
    while (start < points_.size()) {
      std::size_t end = start;
      while (end < points_.size() && points_[end].lag == points_[start].lag && points_[end].spec == points_[start].spec &&
             points_[end].feature == points_[start].feature)
        ++end;
      std::vector<std::pair<Period, double>> series;
      for (std::size_t k = start; k < end; ++k)
        if (points_[k].ratio) series.emplace_back(points_[k].period, *points_[k].ratio);
      const auto rolled = rolling_mean(series);
      std::size_t r = 0;
      for (std::size_t k = start; k < end; ++k)
        if (points_[k].ratio) points_[k].smoothed = rolled[r++].second;
      start = end;
    }
    std::sort(points_.begin(), points_.end(), [](const RatioPoint& a, const RatioPoint& b) {
      return std::tie(a.lag, a.spec, a.period, a.feature) < std::tie(b.lag, b.spec, b.period, b.feature);
    });
    smoothed_ = true;
  }

  std::vector<RatioPoint> points_;
  bool smoothed_ = true;
};

}  // namespace netcast
