#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "netcast/csv.hpp"
#include "netcast/errors.hpp"
#include "netcast/panel.hpp"

namespace netcast {

struct CovariateInfo {
  std::string name;
  bool indicator = false;
};

/// The usual dyadic controls from the conflict literature.
inline const std::vector<CovariateInfo>& canonical_covariates() {
  static const std::vector<CovariateInfo> kCanonical{
      {"joint-democracy", true},   {"trade-dependence", false}, {"joint-IGO-membership", false},
      {"CINC-ratio", false},       {"capital-distance", false}, {"major-power-dyad", true},
      {"defensive-alliance", true}, {"contiguity", true},        {"war-with-ally", true},
  };
  return kCanonical;
}

/// Long-form dyadic covariate panel keyed by (period, sender id, receiver id, name).
class CovariateTable {
 public:
  CovariateTable() : declared_(canonical_covariates()) {}

  /// Adds a non-canonical covariate name. Re-registering an existing name is an error.
  void register_covariate(const std::string& name, bool indicator = false) {
    if (find(name)) throw ValidationError("covariate '" + name + "' already declared");
    declared_.push_back({name, indicator});
  }

  const std::vector<CovariateInfo>& declared() const noexcept { return declared_; }

  void set(Period period, const NodeId& i, const NodeId& j, const std::string& name, double value) {
    auto idx = find(name);
    if (!idx) throw ValidationError("undeclared covariate '" + name + "'");
    if (!std::isfinite(value)) throw ValidationError("non-finite value for '" + name + "'");
    if (declared_[*idx].indicator && value != 0.0 && value != 1.0)
      throw ValidationError("indicator covariate '" + name + "' must be 0 or 1");
    auto& slot = values_[{period, i, j}];
    if (slot.size() < declared_.size()) slot.resize(declared_.size());
    if (slot[*idx]) throw ValidationError("duplicate covariate entry for " + std::to_string(period) + "," + i + "," + j + "," + name);
    slot[*idx] = value;
    present_.resize(declared_.size(), false);
    present_[*idx] = true;
  }

  std::optional<double> get(Period period, const NodeId& i, const NodeId& j, const std::string& name) const {
    auto idx = find(name);
    if (!idx) throw ArgumentError("undeclared covariate '" + name + "'");
    return get(period, i, j, *idx);
  }

  std::optional<double> get(Period period, const NodeId& i, const NodeId& j, std::size_t index) const {
    auto it = values_.find({period, i, j});
    if (it == values_.end() || index >= it->second.size()) return std::nullopt;
    return it->second[index];
  }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t k = 0; k < declared_.size(); ++k)
      if (declared_[k].name == name) return k;
    return std::nullopt;
  }

  /// Declared names that have at least one value, in declaration order.
  std::vector<std::string> present_names() const {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < declared_.size() && k < present_.size(); ++k)
      if (present_[k]) out.push_back(declared_[k].name);
    return out;
  }

  bool empty() const noexcept { return values_.empty(); }

  /// Writes the long-form CSV, sorted by key then declaration order.
  void write_csv(std::ostream& out) const {
    out << "year,i,j,name,value\n";
    for (const auto& [key, slot] : values_) {
      const auto& [p, i, j] = key;
      for (std::size_t k = 0; k < slot.size(); ++k)
        if (slot[k]) out << p << ',' << i << ',' << j << ',' << declared_[k].name << ',' << csv::format(*slot[k]) << '\n';
    }
  }

 private:
  std::vector<CovariateInfo> declared_;
  std::vector<bool> present_;
  std::map<std::tuple<Period, NodeId, NodeId>, std::vector<std::optional<double>>> values_;
};

/// Parses `year,i,j,name,value`. Names outside the canonical set must be passed in `extensions`.
inline CovariateTable load_covariates(std::istream& in, const std::vector<CovariateInfo>& extensions = {}) {
  CovariateTable table;
  for (const auto& e : extensions) table.register_covariate(e.name, e.indicator);
  csv::Reader reader(in, {"year", "i", "j", "name", "value"});
  std::vector<std::string> f;
  while (reader.next(f)) {
    try {
      table.set(csv::parse_int(f[0], reader.line(), "year"), f[1], f[2], f[3],
                csv::parse_double(f[4], reader.line(), "value"));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return table;
}

inline CovariateTable load_covariates_file(const std::string& path, const std::vector<CovariateInfo>& extensions = {}) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  return load_covariates(in, extensions);
}

}  // namespace netcast
