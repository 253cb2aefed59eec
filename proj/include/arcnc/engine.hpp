#ifndef ARCNC_ENGINE_HPP
#define ARCNC_ENGINE_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arcnc/gf.hpp"
#include "arcnc/poly.hpp"
#include "arcnc/rng.hpp"
#include "arcnc/topology.hpp"

namespace arcnc {

/// Input side of an adjacent pair: an incoming edge, or (at the source) the
/// index of one of the m message symbols.
struct PairInput {
  bool source_symbol = false;
  std::size_t index = 0;
  friend auto operator<=>(const PairInput&, const PairInput&) = default;
};

/// An adjacent pair (input, out): the local kernel k_{input,out}(z) lives
/// here.
struct AdjacentPair {
  PairInput input;
  EdgeId out;
  friend auto operator<=>(const AdjacentPair&, const AdjacentPair&) = default;
};

std::string describe(const AdjacentPair& p);

/// Canonical pair order: by output edge id, then source symbols 0..m-1 or
/// incoming edges in id order. Pairs at the source use its message symbols;
/// any incoming edges of the source are ignored.
std::vector<AdjacentPair> adjacent_pairs(const Topology& topo);

/// Time-0 eligibility for random coefficients in cyclic mode: a pair is
/// eligible iff its two edges are consecutive on one of the disjoint paths
/// (source pairs: the output edge starts a path). Acyclic topologies get an
/// all-true mask. Throws std::domain_error if the resulting time-0 kernel is
/// not nilpotent, i.e. eligible pairs close a cycle.
std::vector<bool> init_cyclic(const Topology& topo, const std::vector<AdjacentPair>& pairs);

/// Scripted local-kernel coefficients, text form one per line:
///   k <input> <out-edge> <t> <value>
/// where <input> is an incoming edge id or `s<j>` for source symbol j.
class KernelOverride {
 public:
  /// Throws std::invalid_argument naming the offending line.
  static KernelOverride parse(const std::string& text);

  void set(const AdjacentPair& pair, std::size_t t, Elem value) { values_[{pair, t}] = value; }
  std::optional<Elem> get(const AdjacentPair& pair, std::size_t t) const;
  std::size_t size() const { return values_.size(); }
  const std::map<std::pair<AdjacentPair, std::size_t>, Elem>& entries() const { return values_; }

  /// When set, a coefficient the protocol needs but the script lacks is an
  /// error instead of a random draw.
  bool strict = false;

 private:
  std::map<std::pair<AdjacentPair, std::size_t>, Elem> values_;
};

enum class AckMode { instantaneous };

struct SimConfig {
  Topology topology;
  Field field{2};
  std::size_t max_rounds = 64;
  std::uint64_t base_seed = 1;
  std::optional<KernelOverride> kernel_override;
  AckMode ack_mode = AckMode::instantaneous;
  /// Scripted source stream x_0, x_1, ...; random when absent. Rows shorter
  /// than the run are padded with zeros.
  std::optional<std::vector<RowVector>> messages;
  /// Non-source nodes with a single input forward it (k(z) = 1) instead of
  /// coding. Applies to acyclic topologies only.
  bool relay_copy = true;
  /// Recompute headers from the local kernels and decode every sink after
  /// the run.
  bool verify = true;
  /// Extra symbols decoded beyond the stopping time during verification.
  std::size_t decode_tail = 4;
};

struct TrialResult {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<std::optional<std::size_t>> stopping_times;  // T_i per sink
  std::optional<std::size_t> max_stopping_time;             // T_N
  std::vector<std::size_t> constraint_length;               // L_v per node
  std::vector<double> memory_bits;                          // per node
  std::vector<std::size_t> code_length;                     // per edge
  double avg_stopping_time = 0;                              // NaN on failure
  double avg_code_length = 0;
  double avg_memory_bits = 0;
  bool success = false;
  std::size_t rounds = 0;
  std::size_t eta = 0;
  std::size_t eta_links = 0;

  // Verification (filled when SimConfig::verify is set and the trial succeeded).
  bool verified = false;
  bool headers_consistent = true;
  bool decode_ok = true;
  std::vector<std::optional<std::size_t>> decode_delay;        // δ per sink
  std::vector<std::vector<std::size_t>> decode_columns;        // selected in-edge positions
  std::vector<std::size_t> decode_mismatches;                  // per sink
};

/// What happened in one time step; consumed by the trace printer.
struct StepReport {
  struct Draw {
    AdjacentPair pair;
    Elem value;
    bool scripted;
  };
  struct SinkVerdict {
    NodeId sink;
    ScalarMatrix block;  // F_t
    bool rank_condition;
    std::size_t rank_increment;
    bool decodable;
    bool newly_decoded;
  };
  std::size_t t = 0;
  std::vector<Draw> draws;
  std::vector<SinkVerdict> sinks;
  std::vector<NodeId> newly_acked;
  std::vector<EdgeId> newly_frozen;
};

/// One ARCNC trial, stepped explicitly. The config must outlive the object.
class Simulation {
 public:
  Simulation(const SimConfig& config, std::size_t trial);

  /// Executes time step t = time() and advances.
  const StepReport& step();
  std::size_t time() const { return time_; }
  bool all_decoded() const;
  bool cyclic() const { return !acyclic_; }

  /// Steps until every sink decodes or max_rounds is reached, then computes
  /// metrics and (optionally) verifies.
  TrialResult run();
  /// Metrics (and verification) for the steps executed so far; run() calls
  /// this after its loop.
  TrialResult finish();

  const std::vector<AdjacentPair>& pairs() const { return pairs_; }
  /// k_{pair}(z) as drawn so far.
  Poly kernel(std::size_t pair_index) const { return Poly(kernels_[pair_index]); }
  std::optional<std::size_t> freeze_time(EdgeId e) const { return freeze_[e]; }
  std::optional<std::size_t> stopping_time(std::size_t sink_index) const { return sinks_[sink_index].stop; }
  /// Global kernel matrix of a sink over the steps executed so far.
  PolyMatrix global_kernel(std::size_t sink_index) const;
  Elem symbol(EdgeId e, std::size_t t) const { return symbols_[e][t]; }
  RowVector header(EdgeId e, std::size_t t) const;
  const RowVector& message(std::size_t t) const { return messages_[t]; }

 private:
  enum class Role { source, relay, coder };

  struct SinkState {
    NodeId node;
    std::vector<EdgeId> inputs;
    std::vector<ScalarMatrix> blocks;
    ToeplitzExpansion toeplitz;
    bool rank_condition = false;
    std::optional<std::size_t> stop;
  };

  Elem coefficient_for(std::size_t pair_index, std::size_t t, StepReport& report);
  void compute_edge(EdgeId e, std::size_t t, bool current_only);
  void propagate(std::size_t t);
  void resolve_acks(std::size_t t, StepReport& report);
  TrialResult collect() const;
  void verify(TrialResult& result);

  const SimConfig& cfg_;
  const Topology& topo_;
  const Field& field_;
  std::size_t m_;
  std::size_t trial_;
  std::uint64_t seed_;
  Rng coeff_rng_;
  Rng message_rng_;
  bool acyclic_;
  std::vector<NodeId> order_;          // topological order (acyclic)
  std::vector<EdgeId> edge_order_;     // edges by tail position in order_
  std::vector<Role> role_;
  std::vector<AdjacentPair> pairs_;
  std::vector<std::vector<std::size_t>> pairs_of_edge_;
  std::vector<bool> eligible_t0_;
  std::vector<std::vector<Elem>> kernels_;   // per pair, k_0..k_{len-1}
  std::vector<std::optional<std::size_t>> freeze_;
  std::vector<bool> acked_;
  std::vector<RowVector> messages_;
  std::vector<std::vector<Elem>> symbols_;   // y_{e,t}
  std::vector<std::vector<Elem>> headers_;   // f_{e,t}, flattened t*m + j
  std::vector<Elem> past_symbol_;            // scratch: delayed part of y_{e,t}
  std::vector<Elem> past_header_;            // scratch: delayed part of f_{e,t}
  std::vector<SinkState> sinks_;
  std::size_t time_ = 0;
  StepReport report_;
};

TrialResult run_trial(const SimConfig& config, std::size_t trial);

/// Executes trials [0, count) on `workers` threads; results are ordered by
/// trial index and independent of the worker count.
std::vector<TrialResult> run_trials(const SimConfig& config, std::size_t count, std::size_t workers = 1);

/// Aggregate statistics over a batch of trials.
struct CampaignSummary {
  std::size_t trials = 0;
  std::size_t successes = 0;
  std::size_t sinks = 0;
  std::size_t eta = 0;
  std::size_t eta_links = 0;
  std::size_t max_rounds = 0;

  // Per-trial average stopping time (1/d) sum_i T_i over successful trials.
  double mean_avg_T = 0;
  double var_avg_T = 0;  // unbiased sample variance
  double se_avg_T = 0;
  double se_var_avg_T = 0;  // large-sample standard error of var_avg_T
  // Pooled moments of the per-sink stopping time.
  double mean_T_i = 0;
  double mean_T_i_sq = 0;

  std::vector<double> success_by_t;       // P(T_N <= t), t = 0 .. max_rounds-1
  std::vector<double> sink_success_by_t;  // P(T_i <= t), pooled over sinks
  std::vector<std::size_t> tn_histogram;  // count of T_N = t
  std::vector<double> mean_constraint_length;  // per node
  double mean_avg_code_length = 0;
  double mean_avg_memory_bits = 0;

  std::size_t verified_trials = 0;
  std::size_t header_failures = 0;
  std::size_t decode_failures = 0;
  std::size_t delay_above_stopping_time = 0;  // sinks with δ > T_i
};

CampaignSummary summarize(const std::vector<TrialResult>& results, std::size_t max_rounds);

/// run_trials + summarize.
CampaignSummary collect_campaign(const SimConfig& config, std::size_t trials, std::size_t workers = 1);

}  // namespace arcnc

#endif  // ARCNC_ENGINE_HPP
