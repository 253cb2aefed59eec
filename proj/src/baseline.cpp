#include "arcnc/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "arcnc/analysis.hpp"
#include "arcnc/poly.hpp"
#include "arcnc/rng.hpp"

namespace arcnc {

namespace {

bool copies(const Topology& topo, NodeId v, bool relay_copy) {
  return relay_copy && v != topo.source() && topo.in_edges(v).size() == 1;
}

}  // namespace

RlncResult rlnc_trial(const Topology& topo, const Field& field, std::uint64_t seed, bool relay_copy) {
  const auto acyc = is_acyclic(topo);
  if (!acyc.acyclic) throw std::domain_error("one-shot RLNC needs an acyclic topology");
  const std::size_t m = topo.rate();
  Rng rng(stream_seed(seed, 2));

  // Draws happen in the engine's canonical pair order (by output edge).
  std::vector<std::vector<Elem>> coeff(topo.edge_count());
  for (EdgeId e = 0; e < topo.edge_count(); ++e) {
    const NodeId v = topo.edge(e).from;
    const std::size_t inputs = v == topo.source() ? m : topo.in_edges(v).size();
    coeff[e].resize(inputs);
    for (auto& c : coeff[e]) c = copies(topo, v, relay_copy) ? 1 : rng.element(field);
  }

  std::vector<RowVector> global(topo.edge_count(), RowVector::Zero(m));
  for (NodeId v : acyc.order)
    for (EdgeId e : topo.out_edges(v)) {
      RowVector& f = global[e];
      if (v == topo.source()) {
        for (std::size_t j = 0; j < m; ++j) f(j) = coeff[e][j];
        continue;
      }
      const auto& in = topo.in_edges(v);
      for (std::size_t k = 0; k < in.size(); ++k)
        for (std::size_t j = 0; j < m; ++j) f(j) = field.fma(f(j), coeff[e][k], global[in[k]](j));
    }

  RlncResult r;
  r.success = true;
  r.memory_bits_per_node = static_cast<double>(m) * field.log2_order();
  for (NodeId s : topo.sinks()) {
    const auto& in = topo.in_edges(s);
    ScalarMatrix kernel(m, in.size());
    for (std::size_t k = 0; k < in.size(); ++k) kernel.col(k) = global[in[k]].transpose();
    const bool ok = rank_fq(field, kernel) == m;
    r.sink_success.push_back(ok);
    r.success = r.success && ok;
  }
  return r;
}

std::size_t random_links_upstream(const Topology& topo, NodeId sink, bool relay_copy) {
  std::vector<bool> reaches(topo.node_count(), false);
  std::vector<NodeId> stack{sink};
  reaches[sink] = true;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (EdgeId e : topo.in_edges(v)) {
      const NodeId u = topo.edge(e).from;
      if (!reaches[u]) {
        reaches[u] = true;
        stack.push_back(u);
      }
    }
  }
  std::size_t count = 0;
  for (EdgeId e = 0; e < topo.edge_count(); ++e) {
    const Edge& ed = topo.edge(e);
    if (reaches[ed.to] && !copies(topo, ed.from, relay_copy)) ++count;
  }
  return count;
}

std::vector<RlncRow> rlnc_success_curve(const Topology& topo, const std::vector<std::uint64_t>& qs,
                                        std::size_t trials, std::uint64_t base_seed, std::size_t workers) {
  const std::size_t d = topo.sinks().size();
  std::size_t all_links = 0;
  for (EdgeId e = 0; e < topo.edge_count(); ++e)
    if (!copies(topo, topo.edge(e).from, true)) ++all_links;

  std::vector<RlncRow> rows;
  for (std::uint64_t q : qs) {
    const Field field(q);
    std::vector<std::vector<bool>> flags(trials);
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(trials, 1));
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](std::size_t w) {
      try {
        for (std::size_t i = w; i < trials; i += workers) {
          auto r = rlnc_trial(topo, field, trial_seed(base_seed, i));
          r.sink_success.push_back(r.success);
          flags[i] = std::move(r.sink_success);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);

    for (std::size_t s = 0; s <= d; ++s) {
      RlncRow row{q, std::nullopt, 0, trials, 0, 0, std::nullopt};
      for (const auto& f : flags) row.successes += f[s] ? 1 : 0;
      row.fraction = trials ? static_cast<double>(row.successes) / static_cast<double>(trials) : 0.0;
      row.se = trials ? std::sqrt(row.fraction * (1 - row.fraction) / static_cast<double>(trials)) : 0.0;
      if (s < d) {
        row.sink = s;
        row.ho_bound = ho_bound<double>(1, q, random_links_upstream(topo, topo.sinks()[s]), 0);
      } else {
        row.ho_bound = ho_bound<double>(d, q, all_links, 0);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace arcnc
