#include "arcnc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace arcnc {

std::string describe(const AdjacentPair& p) {
  std::ostringstream os;
  os << '(' << (p.input.source_symbol ? "s" : "") << p.input.index << " -> " << p.out << ')';
  return os.str();
}

std::vector<AdjacentPair> adjacent_pairs(const Topology& topo) {
  std::vector<AdjacentPair> pairs;
  for (EdgeId e = 0; e < topo.edge_count(); ++e) {
    const NodeId v = topo.edge(e).from;
    if (v == topo.source()) {
      for (std::size_t j = 0; j < topo.rate(); ++j) pairs.push_back({{true, j}, e});
    } else {
      for (EdgeId in : topo.in_edges(v)) pairs.push_back({{false, in}, e});
    }
  }
  return pairs;
}

std::vector<bool> init_cyclic(const Topology& topo, const std::vector<AdjacentPair>& pairs) {
  if (is_acyclic(topo).acyclic) return std::vector<bool>(pairs.size(), true);

  const PathSet paths = disjoint_paths(topo);
  std::set<std::pair<EdgeId, EdgeId>> consecutive;
  std::set<EdgeId> first_hops;
  for (const auto& sink_paths : paths.per_sink)
    for (const auto& path : sink_paths) {
      if (!path.empty()) first_hops.insert(path.front());
      for (std::size_t k = 0; k + 1 < path.size(); ++k) consecutive.insert({path[k], path[k + 1]});
    }

  std::vector<bool> mask(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    mask[i] = p.input.source_symbol ? first_hops.count(p.out) > 0 : consecutive.count({p.input.index, p.out}) > 0;
  }

  // The time-0 kernel is nilpotent iff the eligible edge-to-edge pairs form
  // a DAG on the edges.
  const std::size_t n = topo.edge_count();
  std::vector<std::vector<EdgeId>> next(n);
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (mask[i] && !pairs[i].input.source_symbol) {
      next[pairs[i].input.index].push_back(pairs[i].out);
      ++indegree[pairs[i].out];
    }
  std::vector<EdgeId> ready;
  for (EdgeId e = 0; e < n; ++e)
    if (indegree[e] == 0) ready.push_back(e);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const EdgeId e = ready.back();
    ready.pop_back();
    ++seen;
    for (EdgeId f : next[e])
      if (--indegree[f] == 0) ready.push_back(f);
  }
  if (seen != n) throw std::domain_error("disjoint-path initialisation leaves a cycle in the time-0 kernel");
  return mask;
}

// ------------------------------------------------------- KernelOverride

KernelOverride KernelOverride::parse(const std::string& text) {
  KernelOverride ko;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("kernel script line " + std::to_string(line) + ": " + what);
  };
  auto number = [&](const std::string& tok) -> std::size_t {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
      fail("expected a non-negative integer, got '" + tok + "'");
    return static_cast<std::size_t>(std::stoull(tok));
  };
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty()) continue;
    if (tok[0] != "k") fail("unknown directive '" + tok[0] + "'");
    if (tok.size() != 5) fail("expected 'k <input> <out-edge> <t> <value>'");
    PairInput input;
    if (tok[1].size() > 1 && tok[1][0] == 's') {
      input = {true, number(tok[1].substr(1))};
    } else {
      input = {false, number(tok[1])};
    }
    const AdjacentPair pair{input, number(tok[2])};
    const std::size_t t = number(tok[3]);
    if (ko.get(pair, t)) fail("duplicate coefficient for " + describe(pair) + " at t=" + std::to_string(t));
    ko.set(pair, t, static_cast<Elem>(number(tok[4])));
  }
  return ko;
}

std::optional<Elem> KernelOverride::get(const AdjacentPair& pair, std::size_t t) const {
  const auto it = values_.find({pair, t});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

// ----------------------------------------------------------- Simulation

Simulation::Simulation(const SimConfig& config, std::size_t trial)
    : cfg_(config),
      topo_(config.topology),
      field_(config.field),
      m_(config.topology.rate()),
      trial_(trial),
      seed_(trial_seed(config.base_seed, trial)),
      coeff_rng_(stream_seed(seed_, 0)),
      message_rng_(stream_seed(seed_, 1)) {
  if (cfg_.max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");
  const auto acyc = is_acyclic(topo_);
  acyclic_ = acyc.acyclic;
  order_ = acyc.order;

  const std::size_t n = topo_.node_count(), e_count = topo_.edge_count();
  role_.assign(n, Role::coder);
  for (NodeId v = 0; v < n; ++v) {
    if (v == topo_.source())
      role_[v] = Role::source;
    else if (acyclic_ && cfg_.relay_copy && topo_.in_edges(v).size() == 1)
      role_[v] = Role::relay;
  }

  pairs_ = adjacent_pairs(topo_);
  pairs_of_edge_.assign(e_count, {});
  for (std::size_t i = 0; i < pairs_.size(); ++i) pairs_of_edge_[pairs_[i].out].push_back(i);
  eligible_t0_ = init_cyclic(topo_, pairs_);
  kernels_.assign(pairs_.size(), {});

  if (cfg_.kernel_override) {
    // Every scripted key must name a real adjacent pair.
    const std::set<AdjacentPair> known(pairs_.begin(), pairs_.end());
    for (const auto& [key, value] : cfg_.kernel_override->entries())
      if (!known.count(key.first))
        throw std::invalid_argument("kernel script names " + describe(key.first) +
                                    ", which is not an adjacent pair of this topology");
  }

  if (acyclic_) {
    std::vector<std::size_t> position(n);
    for (std::size_t i = 0; i < order_.size(); ++i) position[order_[i]] = i;
    edge_order_.resize(e_count);
    for (EdgeId e = 0; e < e_count; ++e) edge_order_[e] = e;
    std::stable_sort(edge_order_.begin(), edge_order_.end(), [&](EdgeId a, EdgeId b) {
      return position[topo_.edge(a).from] < position[topo_.edge(b).from];
    });
  } else {
    edge_order_.resize(e_count);
    for (EdgeId e = 0; e < e_count; ++e) edge_order_[e] = e;
  }

  freeze_.assign(e_count, std::nullopt);
  acked_.assign(n, false);
  symbols_.assign(e_count, {});
  headers_.assign(e_count, {});
  past_symbol_.assign(e_count, 0);
  past_header_.assign(e_count * m_, 0);

  for (NodeId r : topo_.sinks()) {
    const auto& inputs = topo_.in_edges(r);
    sinks_.push_back(SinkState{r, inputs, {}, ToeplitzExpansion(field_, m_, inputs.size()), false, std::nullopt});
  }
}

bool Simulation::all_decoded() const {
  return std::all_of(sinks_.begin(), sinks_.end(), [](const SinkState& s) { return s.stop.has_value(); });
}

Elem Simulation::coefficient_for(std::size_t i, std::size_t t, StepReport& report) {
  const AdjacentPair& p = pairs_[i];
  if (freeze_[p.out] && *freeze_[p.out] < t) return 0;
  const NodeId v = topo_.edge(p.out).from;
  Elem value = 0;
  if (role_[v] == Role::relay) {
    value = t == 0 ? 1 : 0;
  } else if (t == 0 && !eligible_t0_[i]) {
    value = 0;
  } else if (auto scripted = cfg_.kernel_override ? cfg_.kernel_override->get(p, t) : std::nullopt) {
    if (!field_.contains(*scripted))
      throw std::invalid_argument("scripted coefficient for " + describe(p) + " is outside the field");
    value = *scripted;
    report.draws.push_back({p, value, true});
  } else if (cfg_.kernel_override && cfg_.kernel_override->strict) {
    throw std::invalid_argument("kernel script has no coefficient for pair " + describe(p) + " at t=" +
                                std::to_string(t));
  } else {
    value = coeff_rng_.element(field_);
    report.draws.push_back({p, value, false});
  }
  kernels_[i].push_back(value);
  return value;
}

void Simulation::compute_edge(EdgeId e, std::size_t t, bool current_only) {
  // current_only == false: delayed terms (i >= 1), plus the whole output of
  // the source. current_only == true: y_{e,t} = delayed + sum k_0 y_{e',t}.
  const bool at_source = topo_.edge(e).from == topo_.source();
  if (!current_only) {
    Elem y = 0;
    Elem* f = &past_header_[e * m_];
    std::fill(f, f + m_, Elem{0});
    for (std::size_t pi : pairs_of_edge_[e]) {
      const auto& k = kernels_[pi];
      const PairInput& in = pairs_[pi].input;
      const std::size_t len = std::min(k.size(), t + 1);
      if (at_source) {
        for (std::size_t i = 0; i < len; ++i) y = field_.fma(y, k[i], messages_[t - i](in.index));
        if (t < k.size()) f[in.index] = field_.add(f[in.index], k[t]);
      } else {
        const auto& ys = symbols_[in.index];
        const auto& fs = headers_[in.index];
        for (std::size_t i = 1; i < len; ++i) {
          if (k[i] == 0) continue;
          y = field_.fma(y, k[i], ys[t - i]);
          const Elem* src = &fs[(t - i) * m_];
          for (std::size_t j = 0; j < m_; ++j) f[j] = field_.fma(f[j], k[i], src[j]);
        }
      }
    }
    past_symbol_[e] = y;
    return;
  }
  if (at_source) {
    symbols_[e][t] = past_symbol_[e];
    std::copy_n(&past_header_[e * m_], m_, &headers_[e][t * m_]);
    return;
  }
  Elem y = past_symbol_[e];
  Elem* f = &headers_[e][t * m_];
  std::copy_n(&past_header_[e * m_], m_, f);
  for (std::size_t pi : pairs_of_edge_[e]) {
    const auto& k = kernels_[pi];
    if (k.empty() || k[0] == 0) continue;
    const EdgeId in = pairs_[pi].input.index;
    y = field_.fma(y, k[0], symbols_[in][t]);
    const Elem* src = &headers_[in][t * m_];
    for (std::size_t j = 0; j < m_; ++j) f[j] = field_.fma(f[j], k[0], src[j]);
  }
  symbols_[e][t] = y;
}

void Simulation::propagate(std::size_t t) {
  const std::size_t e_count = topo_.edge_count();
  for (EdgeId e = 0; e < e_count; ++e) {
    symbols_[e].push_back(0);
    headers_[e].resize((t + 1) * m_, 0);
    compute_edge(e, t, false);
  }
  if (acyclic_) {
    for (EdgeId e : edge_order_) compute_edge(e, t, true);
    return;
  }
  // Cyclic: y_t = delayed + K_0 y_t has a unique solution because K_0 is
  // nilpotent; substitution reaches it within |E| sweeps.
  std::vector<Elem> before;
  for (std::size_t sweep = 0; sweep <= e_count + 1; ++sweep) {
    before.clear();
    for (EdgeId e = 0; e < e_count; ++e) {
      before.push_back(symbols_[e][t]);
      before.insert(before.end(), headers_[e].begin() + static_cast<std::ptrdiff_t>(t * m_), headers_[e].end());
    }
    for (EdgeId e : edge_order_) compute_edge(e, t, true);
    std::size_t at = 0;
    bool changed = false;
    for (EdgeId e = 0; e < e_count; ++e) {
      if (before[at++] != symbols_[e][t]) changed = true;
      for (std::size_t j = 0; j < m_; ++j)
        if (before[at++] != headers_[e][t * m_ + j]) changed = true;
    }
    if (!changed) return;
  }
  throw std::logic_error("intra-step fixed point did not converge");
}

void Simulation::resolve_acks(std::size_t t, StepReport& report) {
  const std::size_t n = topo_.node_count();
  // Greatest fixed point: a node ACKs when all its children have ACKed
  // (sinks additionally need to be decodable).
  std::vector<bool> ack(n, true);
  std::vector<bool> undecoded_sink(n, false);
  for (const auto& s : sinks_) undecoded_sink[s.node] = !s.stop;
  for (bool changed = true; changed;) {
    changed = false;
    for (NodeId v = 0; v < n; ++v) {
      if (!ack[v]) continue;
      bool ok = !undecoded_sink[v];
      for (EdgeId e : topo_.out_edges(v)) ok = ok && ack[topo_.edge(e).to];
      if (!ok) {
        ack[v] = false;
        changed = true;
      }
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (ack[v] && !acked_[v]) {
      acked_[v] = true;
      report.newly_acked.push_back(v);
    }
  for (EdgeId e = 0; e < topo_.edge_count(); ++e)
    if (!freeze_[e] && acked_[topo_.edge(e).to]) {
      freeze_[e] = t;
      report.newly_frozen.push_back(e);
    }
}

const StepReport& Simulation::step() {
  const std::size_t t = time_;
  report_ = StepReport{};
  report_.t = t;

  if (cfg_.messages) {
    RowVector x = RowVector::Zero(m_);
    if (t < cfg_.messages->size()) {
      const RowVector& given = (*cfg_.messages)[t];
      for (std::size_t j = 0; j < m_ && j < static_cast<std::size_t>(given.size()); ++j) x(j) = given(j);
    }
    messages_.push_back(x);
  } else {
    RowVector x(m_);
    for (std::size_t j = 0; j < m_; ++j) x(j) = message_rng_.element(field_);
    messages_.push_back(x);
  }

  for (std::size_t i = 0; i < pairs_.size(); ++i) coefficient_for(i, t, report_);
  propagate(t);

  for (auto& s : sinks_) {
    ScalarMatrix block(m_, s.inputs.size());
    for (std::size_t k = 0; k < s.inputs.size(); ++k)
      for (std::size_t j = 0; j < m_; ++j) block(j, k) = headers_[s.inputs[k]][t * m_ + j];
    s.blocks.push_back(block);
    StepReport::SinkVerdict verdict{s.node, block, s.rank_condition, 0, s.stop.has_value(), false};
    if (!s.stop) {
      verdict.rank_increment = s.toeplitz.extend(block);
      if (!s.rank_condition) s.rank_condition = rank_condition(field_, s.blocks, m_);
      verdict.rank_condition = s.rank_condition;
      if (s.rank_condition && verdict.rank_increment == m_) {
        s.stop = t;
        verdict.decodable = verdict.newly_decoded = true;
      }
    }
    report_.sinks.push_back(std::move(verdict));
  }

  resolve_acks(t, report_);
  ++time_;
  return report_;
}

PolyMatrix Simulation::global_kernel(std::size_t sink_index) const {
  return PolyMatrix::from_coefficients(sinks_[sink_index].blocks);
}

TrialResult Simulation::collect() const {
  TrialResult r;
  r.trial = trial_;
  r.seed = seed_;
  r.rounds = time_;
  r.success = all_decoded();
  for (const auto& s : sinks_) r.stopping_times.push_back(s.stop);
  if (r.success) {
    std::size_t tn = 0;
    double sum = 0;
    for (const auto& s : sinks_) {
      tn = std::max(tn, *s.stop);
      sum += static_cast<double>(*s.stop);
    }
    r.max_stopping_time = tn;
    r.avg_stopping_time = sum / static_cast<double>(sinks_.size());
  } else {
    r.avg_stopping_time = std::numeric_limits<double>::quiet_NaN();
  }

  const std::size_t n = topo_.node_count(), e_count = topo_.edge_count();
  r.code_length.resize(e_count);
  for (EdgeId e = 0; e < e_count; ++e) r.code_length[e] = freeze_[e] ? *freeze_[e] + 1 : time_;

  // Last step at which each node was still extending something: its own
  // outgoing kernels, or for a sink its own stopping time.
  std::vector<std::size_t> growth(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (EdgeId e : topo_.out_edges(v)) growth[v] = std::max(growth[v], r.code_length[e] - 1);
    if (topo_.out_edges(v).empty()) {
      if (auto idx = topo_.sink_index(v)) growth[v] = sinks_[*idx].stop.value_or(time_ - 1);
    }
  }
  // A node retains history as long as it or any parent keeps growing.
  r.constraint_length.resize(n);
  r.memory_bits.resize(n);
  double memory_sum = 0;
  for (NodeId v = 0; v < n; ++v) {
    std::size_t g = growth[v];
    for (EdgeId e : topo_.in_edges(v)) g = std::max(g, growth[topo_.edge(e).from]);
    r.constraint_length[v] = g + 1;
    r.memory_bits[v] = static_cast<double>(m_ * (g + 1)) * field_.log2_order();
    memory_sum += r.memory_bits[v];
  }
  r.avg_memory_bits = memory_sum / static_cast<double>(n);

  double code_sum = 0;
  std::size_t coded_edges = 0;
  std::vector<bool> random_link(e_count, false);
  for (EdgeId e = 0; e < e_count; ++e) {
    if (role_[topo_.edge(e).from] == Role::relay) continue;
    code_sum += static_cast<double>(r.code_length[e]);
    ++coded_edges;
  }
  r.avg_code_length = coded_edges ? code_sum / static_cast<double>(coded_edges) : 0.0;

  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (role_[topo_.edge(pairs_[i].out).from] == Role::relay || !eligible_t0_[i]) continue;
    ++r.eta;
    random_link[pairs_[i].out] = true;
  }
  r.eta_links = static_cast<std::size_t>(std::count(random_link.begin(), random_link.end(), true));
  r.decode_delay.assign(sinks_.size(), std::nullopt);
  r.decode_columns.assign(sinks_.size(), {});
  r.decode_mismatches.assign(sinks_.size(), 0);
  return r;
}

void Simulation::verify(TrialResult& result) {
  const std::size_t d = sinks_.size();
  std::size_t horizon = result.rounds - 1 + cfg_.decode_tail;

  std::vector<std::vector<std::size_t>> columns(d);
  std::vector<std::size_t> delays(d, 0);
  bool decodable_all = true;
  auto analyse = [&] {
    while (time_ <= horizon) step();
    for (std::size_t s = 0; s < d; ++s) {
      const PolyMatrix full = PolyMatrix::from_coefficients(
          std::span<const ScalarMatrix>(sinks_[s].blocks.data(), horizon + 1));
      try {
        columns[s] = select_columns(field_, full);
        const Poly det = det_oracle(field_, full.columns(columns[s]));
        delays[s] = static_cast<std::size_t>(det.valuation());
      } catch (const std::domain_error&) {
        decodable_all = false;
        columns[s].clear();
      }
    }
  };
  analyse();
  // Recover at least every symbol sent during the run, plus the tail.
  const std::size_t needed = *std::max_element(delays.begin(), delays.end()) + result.rounds - 1 + cfg_.decode_tail;
  if (decodable_all && needed > horizon) {
    horizon = needed;
    analyse();
  }

  // Headers: recompute every f_e(z) from the local kernels by polynomial
  // products and compare with what travelled in the headers; then check the
  // data path y_e(z) = x(z) f_e(z) on every edge.
  const std::size_t e_count = topo_.edge_count();
  std::vector<Poly> kernel_poly(pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) kernel_poly[i] = Poly(kernels_[i]);
  std::vector<std::vector<Poly>> global(e_count, std::vector<Poly>(m_));
  const std::size_t sweeps = acyclic_ ? 1 : (e_count + 1) * (horizon + 2);
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (EdgeId e : edge_order_) {
      std::vector<Poly> f(m_);
      for (std::size_t pi : pairs_of_edge_[e]) {
        const PairInput& in = pairs_[pi].input;
        if (in.source_symbol) {
          f[in.index] = add(field_, f[in.index], poly_mul_trunc(field_, kernel_poly[pi], Poly::constant(1), horizon));
        } else {
          for (std::size_t j = 0; j < m_; ++j)
            f[j] = add(field_, f[j], poly_mul_trunc(field_, kernel_poly[pi], global[in.index][j], horizon));
        }
      }
      if (f != global[e]) {
        global[e] = std::move(f);
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<Poly> x(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    std::vector<Elem> c(horizon + 1);
    for (std::size_t t = 0; t <= horizon; ++t) c[t] = messages_[t](j);
    x[j] = Poly(std::move(c));
  }
  bool headers_ok = true;
  for (EdgeId e = 0; e < e_count && headers_ok; ++e) {
    Poly y;
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t t = 0; t <= horizon; ++t)
        if (global[e][j].coeff(t) != headers_[e][t * m_ + j]) headers_ok = false;
      y = add(field_, y, poly_mul_trunc(field_, x[j], global[e][j], horizon));
    }
    for (std::size_t t = 0; t <= horizon; ++t)
      if (y.coeff(t) != symbols_[e][t]) headers_ok = false;
  }
  result.headers_consistent = headers_ok;

  bool decode_ok = decodable_all;
  for (std::size_t s = 0; s < d && decodable_all; ++s) {
    const auto& sink = sinks_[s];
    const PolyMatrix full =
        PolyMatrix::from_coefficients(std::span<const ScalarMatrix>(sink.blocks.data(), horizon + 1));
    const PolyMatrix chosen = full.columns(columns[s]);
    std::vector<RowVector> y(horizon + 1, RowVector(m_));
    for (std::size_t t = 0; t <= horizon; ++t)
      for (std::size_t k = 0; k < m_; ++k) y[t](k) = symbols_[sink.inputs[columns[s][k]]][t];
    const DecodeResult decoded = sequential_decode(field_, chosen, y, horizon);
    std::size_t mismatches = 0;
    for (std::size_t t = 0; t < decoded.symbols.size(); ++t)
      if (decoded.symbols[t] != messages_[t]) ++mismatches;
    // Re-encoding the decoded prefix must reproduce the received prefix.
    const std::size_t prefix = decoded.symbols.size() - 1;
    const auto again = encode_stream(field_, chosen, decoded.symbols, prefix);
    for (std::size_t t = 0; t <= prefix; ++t)
      if (again[t] != y[t]) ++mismatches;
    if (decoded.symbols.size() < result.rounds) ++mismatches;
    result.decode_delay[s] = decoded.delay;
    result.decode_columns[s] = columns[s];
    result.decode_mismatches[s] = mismatches;
    if (mismatches) decode_ok = false;
  }
  result.decode_ok = decode_ok;
  result.verified = true;
}

TrialResult Simulation::run() {
  while (time_ < cfg_.max_rounds) {
    step();
    if (all_decoded()) break;
  }
  return finish();
}

TrialResult Simulation::finish() {
  TrialResult result = collect();
  if (cfg_.verify && result.success) verify(result);
  return result;
}

RowVector Simulation::header(EdgeId e, std::size_t t) const {
  RowVector f(m_);
  for (std::size_t j = 0; j < m_; ++j) f(j) = headers_[e][t * m_ + j];
  return f;
}

TrialResult run_trial(const SimConfig& config, std::size_t trial) { return Simulation(config, trial).run(); }

}  // namespace arcnc
