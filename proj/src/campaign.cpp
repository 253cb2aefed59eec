#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "arcnc/engine.hpp"

namespace arcnc {

std::vector<TrialResult> run_trials(const SimConfig& config, std::size_t count, std::size_t workers) {
  std::vector<TrialResult> results(count);
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = run_trial(config, i);
    return results;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) results[i] = run_trial(config, i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

CampaignSummary summarize(const std::vector<TrialResult>& results, std::size_t max_rounds) {
  CampaignSummary s;
  s.trials = results.size();
  s.max_rounds = max_rounds;
  s.success_by_t.assign(max_rounds, 0.0);
  s.sink_success_by_t.assign(max_rounds, 0.0);
  s.tn_histogram.assign(max_rounds, 0);
  if (results.empty()) return s;

  s.sinks = results.front().stopping_times.size();
  s.eta = results.front().eta;
  s.eta_links = results.front().eta_links;
  s.mean_constraint_length.assign(results.front().constraint_length.size(), 0.0);

  std::vector<double> avg;
  double ti_sum = 0, ti_sq = 0;
  std::size_t ti_count = 0;
  for (const auto& r : results) {
    for (std::size_t v = 0; v < r.constraint_length.size(); ++v)
      s.mean_constraint_length[v] += static_cast<double>(r.constraint_length[v]);
    s.mean_avg_code_length += r.avg_code_length;
    s.mean_avg_memory_bits += r.avg_memory_bits;
    for (const auto& ti : r.stopping_times)
      if (ti && *ti < max_rounds)
        for (std::size_t t = *ti; t < max_rounds; ++t) s.sink_success_by_t[t] += 1;
    if (r.verified) {
      ++s.verified_trials;
      if (!r.headers_consistent) ++s.header_failures;
      if (!r.decode_ok) ++s.decode_failures;
      for (std::size_t i = 0; i < r.decode_delay.size(); ++i)
        if (r.decode_delay[i] && r.stopping_times[i] && *r.decode_delay[i] > *r.stopping_times[i])
          ++s.delay_above_stopping_time;
    }
    if (!r.success) continue;
    ++s.successes;
    avg.push_back(r.avg_stopping_time);
    const std::size_t tn = *r.max_stopping_time;
    if (tn < max_rounds) {
      ++s.tn_histogram[tn];
      for (std::size_t t = tn; t < max_rounds; ++t) s.success_by_t[t] += 1;
    }
    for (const auto& ti : r.stopping_times) {
      const double x = static_cast<double>(*ti);
      ti_sum += x;
      ti_sq += x * x;
      ++ti_count;
    }
  }
  const double n = static_cast<double>(s.trials);
  for (auto& v : s.mean_constraint_length) v /= n;
  s.mean_avg_code_length /= n;
  s.mean_avg_memory_bits /= n;
  for (auto& v : s.success_by_t) v /= n;
  for (auto& v : s.sink_success_by_t) v /= n * static_cast<double>(std::max<std::size_t>(s.sinks, 1));
  if (ti_count) {
    s.mean_T_i = ti_sum / static_cast<double>(ti_count);
    s.mean_T_i_sq = ti_sq / static_cast<double>(ti_count);
  }

  const double k = static_cast<double>(avg.size());
  if (avg.empty()) return s;
  double mean = 0;
  for (double a : avg) mean += a;
  mean /= k;
  double m2 = 0, m4 = 0;
  for (double a : avg) {
    const double d2 = (a - mean) * (a - mean);
    m2 += d2;
    m4 += d2 * d2;
  }
  s.mean_avg_T = mean;
  if (avg.size() > 1) {
    s.var_avg_T = m2 / (k - 1);
    s.se_avg_T = std::sqrt(s.var_avg_T / k);
    const double mu2 = m2 / k, mu4 = m4 / k;
    s.se_var_avg_T = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / k);
  }
  return s;
}

CampaignSummary collect_campaign(const SimConfig& config, std::size_t trials, std::size_t workers) {
  return summarize(run_trials(config, trials, workers), config.max_rounds);
}

}  // namespace arcnc
