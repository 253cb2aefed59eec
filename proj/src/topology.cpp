#include "arcnc/topology.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>
#include <sstream>

namespace arcnc {

TopologyError::TopologyError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

Topology::Topology(std::size_t nodes, std::vector<Edge> edges, NodeId source, std::vector<NodeId> sinks,
                   std::size_t rate)
    : nodes_(nodes), edges_(std::move(edges)), source_(source), sinks_(std::move(sinks)), rate_(rate) {
  if (nodes_ == 0) throw TopologyError("topology has no nodes", 0);
  if (source_ >= nodes_) throw TopologyError("source id out of range", 0);
  if (rate_ == 0) throw TopologyError("multicast rate must be positive", 0);
  if (sinks_.empty()) throw TopologyError("no sinks", 0);
  std::set<NodeId> seen;
  for (NodeId s : sinks_) {
    if (s >= nodes_) throw TopologyError("sink id " + std::to_string(s) + " out of range", 0);
    if (s == source_) throw TopologyError("sink " + std::to_string(s) + " is the source", 0);
    if (!seen.insert(s).second) throw TopologyError("duplicate sink " + std::to_string(s), 0);
  }
  in_.assign(nodes_, {});
  out_.assign(nodes_, {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    const auto& [u, v] = edges_[e];
    if (u >= nodes_ || v >= nodes_)
      throw TopologyError("edge " + std::to_string(e) + " references a missing node", 0);
    if (u == v) throw TopologyError("edge " + std::to_string(e) + " is a self-loop", 0);
    out_[u].push_back(e);
    in_[v].push_back(e);
  }
}

std::optional<std::size_t> Topology::sink_index(NodeId v) const {
  const auto it = std::find(sinks_.begin(), sinks_.end(), v);
  if (it == sinks_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - sinks_.begin());
}

bool operator==(const Topology& a, const Topology& b) {
  return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.source_ == b.source_ && a.sinks_ == b.sinks_ &&
         a.rate_ == b.rate_;
}

Topology combination_network(std::size_t n, std::size_t m) {
  if (m == 0 || m > n) throw std::invalid_argument("combination network needs 1 <= m <= n");
  std::vector<Edge> edges;
  for (std::size_t i = 1; i <= n; ++i) edges.push_back({0, i});
  std::vector<NodeId> sinks;
  std::vector<std::size_t> subset(m);
  for (std::size_t i = 0; i < m; ++i) subset[i] = i;
  NodeId next = n + 1;
  while (true) {
    for (std::size_t member : subset) edges.push_back({member + 1, next});
    sinks.push_back(next++);
    std::size_t i = m;
    while (i > 0 && subset[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++subset[i - 1];
    for (std::size_t j = i; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }
  return Topology(next, std::move(edges), 0, std::move(sinks), m);
}

Topology cycle_network() {
  return Topology(4, {{0, 1}, {0, 1}, {1, 2}, {2, 1}, {1, 3}, {2, 3}}, 0, {3}, 2);
}

Topology random_layered_dag(std::size_t layers, std::size_t width, std::size_t sinks, std::size_t rate,
                            std::uint64_t seed) {
  if (layers == 0 || width == 0 || sinks == 0 || rate == 0 || rate > width)
    throw std::invalid_argument("bad layered DAG parameters");
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(rng() % k); };
  std::vector<Edge> edges;
  // Source fans out `rate` parallel-capable edges into each first-layer node.
  NodeId next = 1;
  std::vector<NodeId> prev;
  for (std::size_t l = 0; l < layers; ++l) {
    std::vector<NodeId> layer;
    for (std::size_t w = 0; w < width; ++w) {
      const NodeId v = next++;
      if (l == 0) {
        for (std::size_t k = 0; k < 1 + pick(rate); ++k) edges.push_back({0, v});
      } else {
        const std::size_t parents = 1 + pick(3);
        for (std::size_t k = 0; k < parents; ++k) edges.push_back({prev[pick(prev.size())], v});
      }
      layer.push_back(v);
    }
    prev = std::move(layer);
  }
  std::vector<NodeId> sink_ids;
  for (std::size_t s = 0; s < sinks; ++s) {
    const NodeId r = next++;
    std::vector<NodeId> pool = prev;
    std::shuffle(pool.begin(), pool.end(), rng);
    for (std::size_t k = 0; k < rate; ++k) edges.push_back({pool[k], r});
    if (pick(2) == 0) edges.push_back({prev[pick(prev.size())], r});
    sink_ids.push_back(r);
  }
  return Topology(next, std::move(edges), 0, std::move(sink_ids), rate);
}

// ------------------------------------------------------------- text I/O

namespace {

std::size_t parse_count(const std::string& token, std::size_t line) {
  if (token.empty() || !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw TopologyError("expected a non-negative integer, got '" + token + "'", line);
  try {
    return static_cast<std::size_t>(std::stoull(token));
  } catch (const std::exception&) {
    throw TopologyError("integer out of range: '" + token + "'", line);
  }
}

}  // namespace

Topology load_topology(const std::string& text) {
  std::optional<std::size_t> nodes, rate;
  std::optional<NodeId> source;
  std::optional<std::vector<NodeId>> sinks;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_lines;

  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    auto expect_args = [&](std::size_t n) {
      if (tok.size() != n + 1)
        throw TopologyError("'" + kw + "' takes " + std::to_string(n) + " argument(s)", line);
    };
    auto once = [&](bool already) {
      if (already) throw TopologyError("duplicate '" + kw + "' directive", line);
    };
    if (kw == "nodes") {
      expect_args(1);
      once(nodes.has_value());
      nodes = parse_count(tok[1], line);
    } else if (kw == "m") {
      expect_args(1);
      once(rate.has_value());
      rate = parse_count(tok[1], line);
    } else if (kw == "source") {
      expect_args(1);
      once(source.has_value());
      source = parse_count(tok[1], line);
    } else if (kw == "sinks") {
      once(sinks.has_value());
      if (tok.size() < 2) throw TopologyError("'sinks' needs at least one id", line);
      sinks.emplace();
      for (std::size_t i = 1; i < tok.size(); ++i) sinks->push_back(parse_count(tok[i], line));
    } else if (kw == "edge") {
      expect_args(2);
      edges.push_back({parse_count(tok[1], line), parse_count(tok[2], line)});
      edge_lines.push_back(line);
    } else {
      throw TopologyError("unknown directive '" + kw + "'", line);
    }
  }
  if (!nodes) throw TopologyError("missing 'nodes' directive", 0);
  if (!rate) throw TopologyError("missing 'm' directive", 0);
  if (!source) throw TopologyError("missing 'source' directive", 0);
  if (!sinks) throw TopologyError("missing 'sinks' directive", 0);
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].from >= *nodes || edges[e].to >= *nodes)
      throw TopologyError("edge references a node outside 0.." + std::to_string(*nodes - 1), edge_lines[e]);
    else if (edges[e].from == edges[e].to)
      throw TopologyError("self-loop at node " + std::to_string(edges[e].from), edge_lines[e]);
  return Topology(*nodes, std::move(edges), *source, std::move(*sinks), *rate);
}

std::string save_topology(const Topology& topo) {
  std::ostringstream os;
  os << "nodes " << topo.node_count() << "\n";
  os << "m " << topo.rate() << "\n";
  os << "source " << topo.source() << "\n";
  os << "sinks";
  for (NodeId s : topo.sinks()) os << ' ' << s;
  os << "\n";
  for (const auto& e : topo.edges()) os << "edge " << e.from << ' ' << e.to << "\n";
  return os.str();
}

// ---------------------------------------------------------------- flows

namespace {

/// Unit-capacity BFS augmentation from the source to one sink; stops after
/// `limit` units. Returns the per-edge flow.
std::vector<int> unit_max_flow(const Topology& topo, NodeId sink, std::size_t limit, std::size_t& value) {
  const std::size_t n = topo.node_count();
  std::vector<int> flow(topo.edge_count(), 0);
  value = 0;
  struct Step {
    EdgeId edge;
    bool forward;
  };
  while (value < limit) {
    std::vector<std::optional<Step>> via(n);
    std::vector<bool> seen(n, false);
    std::deque<NodeId> queue{topo.source()};
    seen[topo.source()] = true;
    while (!queue.empty() && !seen[sink]) {
      const NodeId u = queue.front();
      queue.pop_front();
      for (EdgeId e : topo.out_edges(u)) {
        const NodeId v = topo.edge(e).to;
        if (flow[e] == 0 && !seen[v]) {
          seen[v] = true;
          via[v] = Step{e, true};
          queue.push_back(v);
        }
      }
      for (EdgeId e : topo.in_edges(u)) {
        const NodeId v = topo.edge(e).from;
        if (flow[e] == 1 && !seen[v]) {
          seen[v] = true;
          via[v] = Step{e, false};
          queue.push_back(v);
        }
      }
    }
    if (!seen[sink]) break;
    for (NodeId v = sink; v != topo.source();) {
      const Step s = *via[v];
      flow[s.edge] = s.forward ? 1 : 0;
      v = s.forward ? topo.edge(s.edge).from : topo.edge(s.edge).to;
    }
    ++value;
  }
  return flow;
}

}  // namespace

MulticastReport validate_multicast(const Topology& topo) {
  MulticastReport report;
  for (NodeId r : topo.sinks()) {
    std::size_t value = 0;
    unit_max_flow(topo, r, topo.edge_count() + 1, value);
    report.flows.push_back(value);
    if (value < topo.rate()) report.failing.push_back(r);
  }
  return report;
}

PathSet disjoint_paths(const Topology& topo) {
  PathSet set;
  for (NodeId r : topo.sinks()) {
    std::size_t value = 0;
    std::vector<int> flow = unit_max_flow(topo, r, topo.rate(), value);
    if (value < topo.rate())
      throw std::domain_error("sink " + std::to_string(r) + " has only " + std::to_string(value) +
                              " disjoint paths");
    std::vector<std::vector<EdgeId>> paths;
    for (std::size_t k = 0; k < topo.rate(); ++k) {
      std::vector<EdgeId> path;
      std::vector<NodeId> nodes{topo.source()};
      NodeId at = topo.source();
      while (at != r) {
        EdgeId next = topo.edge_count();
        for (EdgeId e : topo.out_edges(at))
          if (flow[e] == 1) {
            next = e;
            break;
          }
        if (next == topo.edge_count()) throw std::logic_error("flow decomposition lost conservation");
        flow[next] = 0;
        at = topo.edge(next).to;
        // A revisit closes a circulation; drop it so the path stays simple.
        if (auto pos = std::find(nodes.begin(), nodes.end(), at); pos != nodes.end()) {
          const auto keep = static_cast<std::size_t>(pos - nodes.begin());
          nodes.resize(keep + 1);
          path.resize(keep);
        } else {
          path.push_back(next);
          nodes.push_back(at);
        }
      }
      paths.push_back(std::move(path));
    }
    set.per_sink.push_back(std::move(paths));
  }
  return set;
}

AcyclicResult is_acyclic(const Topology& topo) {
  const std::size_t n = topo.node_count();
  std::vector<std::size_t> indegree(n, 0);
  for (const auto& e : topo.edges()) ++indegree[e.to];
  std::set<NodeId> ready;
  for (NodeId v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.insert(v);
  AcyclicResult result;
  while (!ready.empty()) {
    const NodeId u = *ready.begin();
    ready.erase(ready.begin());
    result.order.push_back(u);
    for (EdgeId e : topo.out_edges(u))
      if (--indegree[topo.edge(e).to] == 0) ready.insert(topo.edge(e).to);
  }
  result.acyclic = result.order.size() == n;
  if (!result.acyclic) result.order.clear();
  return result;
}

}  // namespace arcnc
