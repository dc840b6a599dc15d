#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stockflow/rational.hpp"

namespace stockflow {

enum class NodeKind { Hospital, LogisticCenter };

struct Node {
  int id = 0;  // 1-based, contiguous across the network
  std::string label;
  NodeKind kind = NodeKind::Hospital;
  std::string province;
  std::int64_t icu_beds = 0;
  Rat64 population_weight{};
};

struct Arc {
  int from = 0;
  int to = 0;
  Rat64 weight{};  // travel time in days, >= 0
};

// Distribution graph plus the two node groupings the planning model uses:
// sharing regions (possibly overlapping) and the disjoint fairness groups.
struct DistributionNetwork {
  std::vector<Node> nodes;
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> regions;    // node ids per sharing region
  std::vector<std::vector<int>> partition;  // pairwise disjoint node ids

  int num_nodes() const { return (int)nodes.size(); }
  const Node& node(int id) const { return nodes.at((size_t)(id - 1)); }
};

struct Finding {
  bool fatal = false;
  std::string message;
};

// Structural checks. Fatal findings make the network unusable (reachability
// construction refuses it); non-fatal ones are advisories, e.g. a hospital
// that belongs to no sharing region and thus can never receive extra stock.
std::vector<Finding> validate_network(const DistributionNetwork& net);

// Extra shipping time added on top of the raw shortest-path weight: either a
// flat amount per shipment, or an amount per logistic-center node strictly
// inside the chosen path (endpoints never count).
struct ProcessingRule {
  enum class Kind { Flat, PerHub };
  Kind kind = Kind::Flat;
  Rat64 amount{};

  static ProcessingRule flat(Rat64 c) { return {Kind::Flat, c}; }
  static ProcessingRule per_hub(Rat64 c) { return {Kind::PerHub, c}; }
};

// All-pairs shortest paths with the processing surcharge folded in. Paths are
// selected by raw weight alone, ties broken by fewer hops, then by smallest
// lexicographic node-id sequence, so the table is fully deterministic.
struct ReachabilityTable {
  struct Entry {
    Rat64 length{};          // raw path weight plus surcharge
    int hops = 0;            // number of arcs on the chosen path
    std::vector<int> path;   // node ids including both endpoints
  };

  int n = 0;
  std::vector<std::optional<Entry>> cells;  // (i-1)*n + (j-1), i != j only

  bool reachable(int i, int j) const {
    return i != j && cells[(size_t)((i - 1) * n + (j - 1))].has_value();
  }
  const Entry& at(int i, int j) const {
    return cells.at((size_t)((i - 1) * n + (j - 1))).value();
  }
  // Reachable ordered pairs in lexicographic order.
  std::vector<std::pair<int, int>> pairs() const;
};

ReachabilityTable build_reachability(const DistributionNetwork& net,
                                     const ProcessingRule& processing);

// Whole periods a shipment over a path of this length is in transit.
inline int shipping_lag(const Rat64& length) {
  return (int)((length.num() + length.den() - 1) / length.den());
}

// Complete bidirectional graph over the given nodes. Distances must be
// symmetric with a zero diagonal; arc weights are the distances divided by
// the largest one, so the longest arc has weight exactly 1.
DistributionNetwork make_complete_graph(std::vector<Node> nodes,
                                        const std::vector<std::vector<Rat64>>& distance);

// Star-of-stars graph: every hospital links to its province's logistic
// center, and every provincial center links to the regional center when one
// is given. Nodes named as centers are promoted to the logistic-center role
// and get no hospital spoke of their own. Weights are normalized so the
// longest created link has weight 1.
DistributionNetwork make_lc_graph(std::vector<Node> nodes,
                                  const std::map<std::string, int>& provincial_centers,
                                  std::optional<int> regional_center,
                                  const std::vector<std::vector<Rat64>>& distance);

}  // namespace stockflow
