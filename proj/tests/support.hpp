#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "netcast/netcast.hpp"

namespace testing_support {

inline netcast::EventPanel panel_from_csv(const std::string& events, const std::string& registry = {}) {
  std::istringstream ev(events);
  if (registry.empty()) return netcast::load_events(ev);
  std::istringstream reg(registry);
  return netcast::load_events(ev, &reg);
}

inline int id(const netcast::EventPanel& p, const std::string& name) { return *p.index_of(name); }

/// Network over `names` with the given directed edges, one period.
inline netcast::LaggedNetwork network(const std::vector<std::string>& names,
                                      const std::vector<std::pair<std::string, std::string>>& edges,
                                      netcast::EventPanel* panel_out = nullptr) {
  std::vector<netcast::RawEvent> ev;
  for (const auto& [a, b] : edges) ev.push_back({a, b, 2000});
  std::map<netcast::NodeId, netcast::Span> reg;
  for (const auto& n : names) reg[n] = {2000, 2000};
  auto p = netcast::EventPanel::create(ev, reg);
  auto net = netcast::aggregate_window(p, 2000, 2000);
  if (panel_out) *panel_out = p;
  return net;
}

}  // namespace testing_support
