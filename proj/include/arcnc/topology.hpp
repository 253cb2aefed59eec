#ifndef ARCNC_TOPOLOGY_HPP
#define ARCNC_TOPOLOGY_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace arcnc {

using NodeId = std::size_t;
using EdgeId = std::size_t;

struct Edge {
  NodeId from;
  NodeId to;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Thrown by load_topology; carries the offending line (1-based, 0 when the
/// problem is not tied to a line).
class TopologyError : public std::runtime_error {
 public:
  TopologyError(const std::string& what, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Directed multigraph with unit-capacity edges, one source, a sink set and
/// a multicast rate. Edge ids are positions in the edge list and drive all
/// tie-breaking.
class Topology {
 public:
  Topology() = default;
  /// Throws TopologyError on out-of-range ids, a sink equal to the source,
  /// duplicate sinks, an empty sink set or a zero rate.
  Topology(std::size_t nodes, std::vector<Edge> edges, NodeId source, std::vector<NodeId> sinks,
           std::size_t rate);

  std::size_t node_count() const { return nodes_; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  NodeId source() const { return source_; }
  const std::vector<NodeId>& sinks() const { return sinks_; }
  std::size_t rate() const { return rate_; }

  /// Incoming / outgoing edge ids of v in increasing id order.
  const std::vector<EdgeId>& in_edges(NodeId v) const { return in_[v]; }
  const std::vector<EdgeId>& out_edges(NodeId v) const { return out_[v]; }
  /// Position of v in sinks(), if v is a sink.
  std::optional<std::size_t> sink_index(NodeId v) const;

  friend bool operator==(const Topology& a, const Topology& b);

 private:
  std::size_t nodes_ = 0;
  std::vector<Edge> edges_;
  NodeId source_ = 0;
  std::vector<NodeId> sinks_;
  std::size_t rate_ = 0;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<std::vector<EdgeId>> out_;
};

/// Single source (node 0), intermediates 1..n, then one sink per m-subset of
/// intermediates in lexicographic order. Edges: s->i for i = 1..n (ids
/// 0..n-1), then for each sink its m incoming edges in intermediate order.
Topology combination_network(std::size_t n, std::size_t m);

/// Two-node cycle: s=0, a=1, b=2, sink r=3, m=2. Edges s->a twice (ids 0,
/// 1), a->b, b->a, a->r, b->r.
Topology cycle_network();

/// Seeded layered DAG for property tests: `layers` layers of `width` relay /
/// coding nodes, each node drawing 1..3 parents from the previous layer (the
/// source for the first layer), and `sinks` sinks each wired to `rate`
/// distinct nodes of the last layer plus random extras. Sinks whose min-cut
/// falls short of `rate` are possible; check with validate_multicast.
Topology random_layered_dag(std::size_t layers, std::size_t width, std::size_t sinks, std::size_t rate,
                            std::uint64_t seed);

Topology load_topology(const std::string& text);
std::string save_topology(const Topology& topo);

struct MulticastReport {
  std::vector<std::size_t> flows;  // per sink, in sinks() order
  std::vector<NodeId> failing;     // sinks with flow < rate
  bool ok() const { return failing.empty(); }
};

/// Max-flow from the source to every sink with unit edge capacities.
MulticastReport validate_multicast(const Topology& topo);

/// Per sink, `rate` edge-disjoint source-to-sink paths (edge id sequences).
struct PathSet {
  std::vector<std::vector<std::vector<EdgeId>>> per_sink;
};

/// Extracts the paths from an integral max-flow found by BFS augmentation
/// that scans edges in id order. Throws std::domain_error if some sink has
/// fewer than `rate` disjoint paths.
PathSet disjoint_paths(const Topology& topo);

struct AcyclicResult {
  bool acyclic = false;
  std::vector<NodeId> order;  // topological order when acyclic
};

/// Kahn's algorithm, smallest ready node id first.
AcyclicResult is_acyclic(const Topology& topo);

}  // namespace arcnc

#endif  // ARCNC_TOPOLOGY_HPP
