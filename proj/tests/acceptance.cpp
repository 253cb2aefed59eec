// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance                 run every criterion
//   acceptance --criterion N   run criterion N only
// Exit status is nonzero if any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arcnc/analysis.hpp"
#include "arcnc/baseline.hpp"
#include "arcnc/engine.hpp"
#include "arcnc/harness.hpp"

using namespace arcnc;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SimConfig comb_config(std::size_t n, std::size_t m, std::uint32_t q, std::uint64_t seed, bool verify = false) {
  SimConfig c;
  c.topology = combination_network(n, m);
  c.field = Field(q);
  c.base_seed = seed;
  c.verify = verify;
  return c;
}

// 1. Scripted fig1 trial reproduces the reference values.
Outcome golden_trace() {
  const auto start = std::chrono::steady_clock::now();
  CampaignConfig c;
  c.topology = "fig1";
  c.override_path = std::string(ARCNC_DATA_DIR) + "/fig1.kernel";
  std::ostringstream os;
  const TrialResult r = cmd_trace(c, os);
  const double elapsed = seconds_since(start);
  const std::string out = os.str();
  const std::vector<std::optional<std::size_t>> T{0, 0, 0, 0, 0, 1};
  const std::vector<std::size_t> lens{1, 1, 2, 2};
  const bool ok = r.stopping_times == T && std::abs(r.avg_stopping_time - 1.0 / 6) < 1e-12 &&
                  std::vector<std::size_t>(r.code_length.begin(), r.code_length.begin() + 4) == lens &&
                  std::abs(r.avg_code_length - 1.5) < 1e-12 && std::abs(r.avg_memory_bits - 42.0 / 11) < 1e-12 &&
                  r.eta == 8 && r.decode_ok && r.headers_consistent &&
                  out.find("average memory: 42/11 bits") != std::string::npos && elapsed < 1.0;
  return {ok, "T = 0 0 0 0 0 1, code lengths 1 1 2 2, memory 42/11, eta 8; " + fmt(elapsed) + " s"};
}

// 2. The rank-increment test agrees with det F(z) != 0 on random matrices.
Outcome decodable_vs_det() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::size_t total = 0, disagree = 0, decodable_only = 0;
  std::string example;
  for (std::uint32_t q : {2u, 3u, 4u, 5u}) {
    const Field f(q);
    std::uniform_int_distribution<Elem> u(0, q - 1);
    for (std::size_t m = 1; m <= 3; ++m)
      for (std::size_t t = 0; t <= 4; ++t)
        for (int rep = 0; rep < 60; ++rep) {
          std::vector<ScalarMatrix> blocks(t + 1, ScalarMatrix(m, m));
          for (auto& b : blocks)
            for (Eigen::Index i = 0; i < b.rows(); ++i)
              for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = u(rng);
          const bool dec = decodable(f, blocks, m);
          const bool det = !det_oracle(f, PolyMatrix::from_coefficients(blocks)).is_zero();
          ++total;
          if (dec != det) {
            ++disagree;
            if (dec) ++decodable_only;
            if (example.empty())
              example = "first disagreement at q=" + std::to_string(q) + " m=" + std::to_string(m) +
                        " t=" + std::to_string(t);
          }
        }
  }
  const double elapsed = seconds_since(start);
  return {disagree == 0 && elapsed < 30,
          std::to_string(disagree) + "/" + std::to_string(total) + " disagree (" + std::to_string(decodable_only) +
              " decodable with det = 0); " + example + "; " + fmt(elapsed) + " s"};
}

// 3. Every sink's decoder reproduces the source stream; delta equals the
//    valuation of det on the selected columns.
Outcome decoder_round_trip() {
  std::size_t trials = 0, mismatches = 0, undecoded = 0, delay_errors = 0, header_errors = 0;
  for (std::size_t n : {4u, 5u})
    for (std::uint32_t q : {2u, 3u}) {
      const SimConfig cfg = comb_config(n, 2, q, 31, true);
      for (std::size_t i = 0; i < 10000; ++i) {
        Simulation sim(cfg, i);
        const TrialResult r = sim.run();
        ++trials;
        if (!r.success) {
          ++undecoded;
          continue;
        }
        header_errors += !r.headers_consistent;
        for (std::size_t s = 0; s < r.stopping_times.size(); ++s) {
          mismatches += r.decode_mismatches[s];
          if (!r.decode_delay[s]) {
            ++delay_errors;
            continue;
          }
          const PolyMatrix F = sim.global_kernel(s).columns(r.decode_columns[s]);
          const Poly det = det_oracle(cfg.field, F);
          if (det.valuation() != static_cast<int>(*r.decode_delay[s])) ++delay_errors;
        }
      }
    }
  const bool ok = mismatches == 0 && undecoded == 0 && delay_errors == 0 && header_errors == 0;
  return {ok, std::to_string(trials) + " trials, " + std::to_string(mismatches) + " symbol mismatches, " +
                  std::to_string(delay_errors) + " delay errors, " + std::to_string(header_errors) +
                  " header errors, " + std::to_string(undecoded) + " undecoded"};
}

// 4. Mean per-sink stopping time on (4,2), q = 2.
Outcome mean_stopping_time() {
  const auto start = std::chrono::steady_clock::now();
  const CampaignSummary s = collect_campaign(comb_config(4, 2, 2, 4), 100000);
  const double elapsed = seconds_since(start);
  const double exact = exact_ET(2, 2), upper = et_upper<double>(2, 2);
  const bool near_exact = std::abs(s.mean_avg_T - exact) <= 3 * s.se_avg_T;
  const bool below_upper = s.mean_avg_T <= upper + 3 * s.se_avg_T;
  return {near_exact && below_upper && elapsed < 300,
          "mean " + fmt(s.mean_avg_T) + " (se " + fmt(s.se_avg_T) + "), exact series " + fmt(exact) +
              (near_exact ? " within" : " NOT within") + " 3 se; upper 5/3 " + (below_upper ? "holds" : "violated") +
              "; " + fmt(elapsed) + " s"};
}

// 5. Empirical P(T_N <= t) against the lower bound at t = 2, 3.
Outcome success_vs_bound() {
  const std::size_t N = 100000;
  const CampaignSummary s = collect_campaign(comb_config(4, 2, 2, 5), N);
  bool ok = s.eta == 8;
  std::string detail = "eta " + std::to_string(s.eta);
  for (std::size_t t : {2u, 3u}) {
    const double p = s.success_by_t[t];
    const double bound = *ho_bound<double>(6, 2, 8, t);
    const double sigma = std::sqrt(p * (1 - p) / N);
    ok = ok && p >= bound - 3 * sigma;
    detail += "; t=" + std::to_string(t) + ": " + fmt(p) + " vs bound " + fmt(bound);
  }
  return {ok, detail};
}

// 6. The mean does not depend on n.
Outcome n_independence() {
  std::vector<double> lo, hi;
  std::string detail;
  for (std::size_t n : {4u, 5u, 6u}) {
    const CampaignSummary s = collect_campaign(comb_config(n, 2, 2, 6), 100000);
    lo.push_back(s.mean_avg_T - 3 * s.se_avg_T);
    hi.push_back(s.mean_avg_T + 3 * s.se_avg_T);
    detail += "n=" + std::to_string(n) + ": " + fmt(s.mean_avg_T) + " +- " + fmt(3 * s.se_avg_T) + "; ";
  }
  bool ok = true;
  for (std::size_t i = 0; i < lo.size(); ++i)
    for (std::size_t j = i + 1; j < lo.size(); ++j) ok = ok && lo[i] <= hi[j] && lo[j] <= hi[i];
  return {ok, detail + (ok ? "intervals overlap" : "intervals disjoint")};
}

// 7. Variance of the per-trial mean: below the bound on (6,2) and not
//    increasing with n.
Outcome variance() {
  std::vector<CampaignSummary> s;
  std::string detail;
  for (std::size_t n : {4u, 6u, 8u}) {
    s.push_back(collect_campaign(comb_config(n, 2, 2, 7), 100000));
    detail += "n=" + std::to_string(n) + ": var " + fmt(s.back().var_avg_T) + " (se " + fmt(s.back().se_var_avg_T) +
              "); ";
  }
  const double bound = var_upper<double>(6, 2, 2);
  bool ok = s[1].var_avg_T <= bound;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double tol = 3 * std::hypot(s[i].se_var_avg_T, s[i + 1].se_var_avg_T);
    ok = ok && s[i + 1].var_avg_T <= s[i].var_avg_T + tol;
  }
  return {ok, detail + "bound at n=6 " + fmt(bound)};
}

// 8. Scalar RLNC per-sink success at q = 8 against the full-rank
//    probability, and the exact bound value.
Outcome rlnc_q8() {
  const Topology comb = combination_network(4, 2);
  const auto rows = rlnc_success_curve(comb, {8}, 200000, 8);
  std::size_t succ = 0, draws = 0;
  for (const auto& r : rows)
    if (r.sink) {
      succ += r.successes;
      draws += r.trials;
    }
  const double p = static_cast<double>(succ) / static_cast<double>(draws);
  const double expected = 441.0 / 512;
  const double sigma = std::sqrt(expected * (1 - expected) / static_cast<double>(draws));
  const bool exact = *ho_bound<Rational>(1, 8, 2, 0) == Rational(49) / 64 &&
                     full_rank_prob_Q<Rational>(8, 2, 1) == Rational(441) / 512;
  return {std::abs(p - expected) <= 3 * sigma && exact && draws >= 1000000,
          fmt(p) + " over " + std::to_string(draws) + " draws vs 441/512 = " + fmt(expected) + " (sigma " +
              fmt(sigma) + "); bound 49/64 exact: " + (exact ? "yes" : "no")};
}

// 9. The engine's one-step sink success matches one-shot RLNC.
Outcome engine_vs_rlnc() {
  const std::size_t N = 100000;
  const CampaignSummary s = collect_campaign(comb_config(4, 2, 8, 9), N);
  const auto rows = rlnc_success_curve(combination_network(4, 2), {8}, N, 10);
  std::size_t succ = 0, draws = 0;
  for (const auto& r : rows)
    if (r.sink) {
      succ += r.successes;
      draws += r.trials;
    }
  const double a = s.sink_success_by_t[0];
  const double b = static_cast<double>(succ) / static_cast<double>(draws);
  const double p = (a + b) / 2;
  const double sigma = std::sqrt(p * (1 - p) * (1.0 / (N * 6.0) + 1.0 / static_cast<double>(draws)));
  return {std::abs(a - b) <= 3 * sigma, "engine " + fmt(a) + ", rlnc " + fmt(b) + " (sigma " + fmt(sigma) + ")"};
}

// 10. Cyclic network: decoding within 10 rounds, verified end to end.
Outcome cyclic() {
  SimConfig c;
  c.topology = cycle_network();
  c.field = Field(4);
  c.max_rounds = 10;
  c.base_seed = 10;
  const std::size_t N = 10000;
  const CampaignSummary s = collect_campaign(c, N);
  const double frac = static_cast<double>(s.successes) / N;
  const bool ok = frac >= 0.99 && s.verified_trials == s.successes && s.header_failures == 0 &&
                  s.decode_failures == 0;
  return {ok, fmt(frac) + " decoded within 10 rounds; " + std::to_string(s.verified_trials) + " verified, " +
                  std::to_string(s.header_failures) + " header and " + std::to_string(s.decode_failures) +
                  " decode failures"};
}

// 11. A larger field decodes sooner.
Outcome field_size() {
  const CampaignSummary small = collect_campaign(comb_config(4, 2, 2, 11), 10000);
  const CampaignSummary large = collect_campaign(comb_config(4, 2, 256, 11), 10000);
  return {large.mean_avg_T < small.mean_avg_T,
          "q=256: " + fmt(large.mean_avg_T) + ", q=2: " + fmt(small.mean_avg_T)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> criteria{
      golden_trace, decodable_vs_det, decoder_round_trip, mean_stopping_time, success_vs_bound, n_independence,
      variance,     rlnc_q8,          engine_vs_rlnc,     cyclic,             field_size};
  if (only < 0 || only > static_cast<int>(criteria.size())) {
    std::cerr << "no criterion " << only << "\n";
    return 1;
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
