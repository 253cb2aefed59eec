#ifndef ARCNC_BASELINE_HPP
#define ARCNC_BASELINE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "arcnc/gf.hpp"
#include "arcnc/topology.hpp"

namespace arcnc {

struct RlncResult {
  std::vector<bool> sink_success;  // in sinks() order
  bool success = false;            // all sinks
  double memory_bits_per_node = 0; // m log2 q
};

/// One-shot scalar RLNC on an acyclic topology: every adjacent pair draws a
/// uniform coefficient (single-input relays forward, as in the engine), and
/// a sink succeeds iff its m x |In(r)| global kernel has rank m. Coefficients
/// come from stream 2 of `seed`. Throws std::domain_error on cyclic input.
RlncResult rlnc_trial(const Topology& topo, const Field& field, std::uint64_t seed, bool relay_copy = true);

/// Edges carrying random coefficients from which sink r is reachable.
std::size_t random_links_upstream(const Topology& topo, NodeId sink, bool relay_copy = true);

struct RlncRow {
  std::uint64_t q;
  std::optional<std::size_t> sink;  // nullopt: all sinks jointly
  std::size_t successes;
  std::size_t trials;
  double fraction;
  double se;                        // binomial standard error
  std::optional<double> ho_bound;   // nullopt: not applicable
};

/// Per q: one row per sink (ho_bound with d = 1 and that sink's upstream
/// random links) and a final all-sinks row (d = sink count, eta = all random
/// links). Trial i under base seed b uses trial_seed(b, i).
std::vector<RlncRow> rlnc_success_curve(const Topology& topo, const std::vector<std::uint64_t>& qs,
                                        std::size_t trials, std::uint64_t base_seed = 1,
                                        std::size_t workers = 1);

}  // namespace arcnc

#endif  // ARCNC_BASELINE_HPP
