#pragma once

// Event panel: directed dyadic events between registered nodes, plus the
// lagged (window-aggregated) networks built from it.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "netcast/csv.hpp"
#include "netcast/errors.hpp"

namespace netcast {

using Period = int;
using NodeId = std::string;

/// Inclusive range of periods during which a node is in the system.
struct Span {
  Period first = 0;
  Period last = 0;
  bool covers(Period p) const noexcept { return first <= p && p <= last; }
  bool intersects(Period a, Period b) const noexcept { return first <= b && a <= last; }
  friend bool operator==(const Span&, const Span&) = default;
};

/// One initiation event. Endpoints are indices into `EventPanel::nodes()`.
struct Event {
  int sender = 0;
  int receiver = 0;
  Period period = 0;
  friend auto operator<=>(const Event& a, const Event& b) {
    return std::tie(a.period, a.sender, a.receiver) <=> std::tie(b.period, b.sender, b.receiver);
  }
  friend bool operator==(const Event&, const Event&) = default;
};

/// Ordered pair of node indices.
struct Dyad {
  int sender = 0;
  int receiver = 0;
  friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

struct RawEvent {
  NodeId sender;
  NodeId receiver;
  Period period = 0;
};

/// Immutable, validated event data. Nodes are indexed in lexicographic id
/// order, so every derived quantity is independent of input row order.
class EventPanel {
 public:
  EventPanel() : ids_(std::make_shared<std::vector<NodeId>>()) {}

  /// Validates and indexes events. Without a registry, each node is active
  /// from its first to its last event involvement.
  static EventPanel create(const std::vector<RawEvent>& events,
                           std::optional<std::map<NodeId, Span>> registry = std::nullopt) {
    std::map<NodeId, Span> spans;
    if (registry) {
      for (const auto& [id, s] : *registry)
        if (s.first > s.last) throw ValidationError("node '" + id + "' has first_year > last_year");
      spans = *registry;
    } else {
      for (const auto& e : events) {
        for (const auto* id : {&e.sender, &e.receiver}) {
          auto [it, fresh] = spans.try_emplace(*id, Span{e.period, e.period});
          if (!fresh) {
            it->second.first = std::min(it->second.first, e.period);
            it->second.last = std::max(it->second.last, e.period);
          }
        }
      }
    }

    EventPanel panel;
    auto ids = std::make_shared<std::vector<NodeId>>();
    for (const auto& [id, s] : spans) {
      ids->push_back(id);
      panel.spans_.push_back(s);
    }
    panel.ids_ = ids;

    for (const auto& e : events) {
      if (e.sender == e.receiver)
        throw ValidationError("self-initiation " + e.sender + "->" + e.receiver + " in " +
                              std::to_string(e.period));
      auto s = panel.index_of(e.sender);
      auto r = panel.index_of(e.receiver);
      if (!s || !r)
        throw ValidationError("event " + e.sender + "->" + e.receiver + " names an unregistered node");
      if (!panel.spans_[*s].covers(e.period) || !panel.spans_[*r].covers(e.period))
        throw ValidationError("event " + e.sender + "->" + e.receiver + " in " + std::to_string(e.period) +
                              " lies outside a node's registry span");
      panel.events_.push_back(Event{*s, *r, e.period});
    }
    std::sort(panel.events_.begin(), panel.events_.end());
    return panel;
  }

  const std::vector<NodeId>& nodes() const noexcept { return *ids_; }
  std::shared_ptr<const std::vector<NodeId>> shared_nodes() const noexcept { return ids_; }
  std::size_t node_count() const noexcept { return ids_->size(); }
  const Span& span(int node) const { return spans_.at(static_cast<std::size_t>(node)); }
  const std::vector<Span>& spans() const noexcept { return spans_; }

  /// Events sorted by (period, sender, receiver); duplicates retained.
  const std::vector<Event>& events() const noexcept { return events_; }

  std::optional<int> index_of(const NodeId& id) const {
    auto it = std::lower_bound(ids_->begin(), ids_->end(), id);
    if (it == ids_->end() || *it != id) return std::nullopt;
    return static_cast<int>(it - ids_->begin());
  }

  /// Events with period in [start, end].
  std::pair<std::vector<Event>::const_iterator, std::vector<Event>::const_iterator> events_in(
      Period start, Period end) const {
    auto lo = std::lower_bound(events_.begin(), events_.end(), start,
                               [](const Event& e, Period p) { return e.period < p; });
    auto hi = std::upper_bound(events_.begin(), events_.end(), end,
                               [](Period p, const Event& e) { return p < e.period; });
    return {lo, hi};
  }

  /// Smallest and largest period covered by any registry span.
  std::optional<std::pair<Period, Period>> period_range() const {
    if (spans_.empty()) return std::nullopt;
    Period lo = spans_.front().first, hi = spans_.front().last;
    for (const auto& s : spans_) {
      lo = std::min(lo, s.first);
      hi = std::max(hi, s.last);
    }
    return std::pair{lo, hi};
  }

  bool active(int node, Period p) const { return span(node).covers(p); }

 private:
  std::shared_ptr<std::vector<NodeId>> ids_;
  std::vector<Span> spans_;
  std::vector<Event> events_;
};

/// Parses `sender,receiver,year` rows and an optional `node,first_year,last_year` registry.
inline EventPanel load_events(std::istream& events, std::istream* registry = nullptr) {
  std::vector<RawEvent> raw;
  {
    csv::Reader reader(events, {"sender", "receiver", "year"});
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (f[0].empty() || f[1].empty()) throw ParseError(reader.line(), "empty node id");
      raw.push_back({f[0], f[1], csv::parse_int(f[2], reader.line(), "year")});
    }
  }
  std::optional<std::map<NodeId, Span>> spans;
  if (registry) {
    spans.emplace();
    csv::Reader reader(*registry, {"node", "first_year", "last_year"});
    std::vector<std::string> f;
    while (reader.next(f)) {
      if (f[0].empty()) throw ParseError(reader.line(), "empty node id");
      Span s{csv::parse_int(f[1], reader.line(), "first_year"), csv::parse_int(f[2], reader.line(), "last_year")};
      if (!spans->emplace(f[0], s).second) throw ParseError(reader.line(), "duplicate node '" + f[0] + "'");
    }
  }
  return EventPanel::create(raw, std::move(spans));
}

inline EventPanel load_events_file(const std::string& events_path, const std::string& registry_path = {}) {
  std::ifstream ev(events_path);
  if (!ev) throw ArgumentError("cannot open " + events_path);
  if (registry_path.empty()) return load_events(ev);
  std::ifstream reg(registry_path);
  if (!reg) throw ArgumentError("cannot open " + registry_path);
  return load_events(ev, &reg);
}

/// Binary directed network aggregated over an inclusive window of periods.
struct LaggedNetwork {
  Period start = 0;
  Period end = 0;
  std::size_t universe = 0;                 ///< node count of the source panel
  std::shared_ptr<const std::vector<NodeId>> ids;
  std::vector<int> nodes;                   ///< active in window, ascending
  std::vector<Dyad> edges;                  ///< sorted, unique

  bool has_edge(int i, int j) const {
    return std::binary_search(edges.begin(), edges.end(), Dyad{i, j});
  }

  bool contains(int node) const { return std::binary_search(nodes.begin(), nodes.end(), node); }

  /// FNV-1a over the node set and edge list; identifies the structure for caching.
  std::uint64_t content_hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
      for (int b = 0; b < 8; ++b) {
        h ^= (v >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    };
    mix(universe);
    mix(nodes.size());
    for (int n : nodes) mix(static_cast<std::uint64_t>(n));
    mix(edges.size());
    for (const auto& e : edges) mix((static_cast<std::uint64_t>(e.sender) << 32) | static_cast<std::uint32_t>(e.receiver));
    if (ids)
      for (int n : nodes)
        for (char c : (*ids)[static_cast<std::size_t>(n)]) mix(static_cast<unsigned char>(c));
    return h;
  }
};

inline LaggedNetwork aggregate_window(const EventPanel& panel, Period start, Period end) {
  if (start > end)
    throw ArgumentError("window start " + std::to_string(start) + " after end " + std::to_string(end));
  LaggedNetwork net;
  net.start = start;
  net.end = end;
  net.universe = panel.node_count();
  net.ids = panel.shared_nodes();
  for (std::size_t i = 0; i < panel.node_count(); ++i)
    if (panel.spans()[i].intersects(start, end)) net.nodes.push_back(static_cast<int>(i));
  auto [lo, hi] = panel.events_in(start, end);
  for (auto it = lo; it != hi; ++it) net.edges.push_back({it->sender, it->receiver});
  std::sort(net.edges.begin(), net.edges.end());
  net.edges.erase(std::unique(net.edges.begin(), net.edges.end()), net.edges.end());
  return net;
}

/// Ordered pairs of distinct nodes both active in `outcome - 1`.
inline std::vector<Dyad> eligible_dyads(const EventPanel& panel, Period outcome) {
  if (auto range = panel.period_range(); range && (outcome - 1 < range->first || outcome - 1 > range->second))
    throw ArgumentError("period " + std::to_string(outcome - 1) + " outside data range");
  std::vector<int> active;
  for (std::size_t i = 0; i < panel.node_count(); ++i)
    if (panel.spans()[i].covers(outcome - 1)) active.push_back(static_cast<int>(i));
  std::vector<Dyad> out;
  out.reserve(active.size() * (active.size() > 0 ? active.size() - 1 : 0));
  for (int i : active)
    for (int j : active)
      if (i != j) out.push_back({i, j});
  return out;
}

}  // namespace netcast
