#ifndef ARCNC_HARNESS_HPP
#define ARCNC_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcnc/baseline.hpp"
#include "arcnc/engine.hpp"
#include "arcnc/topology.hpp"

namespace arcnc {

/// Bad input: exit code 1.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file: exit code 2.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Campaign settings. The config file is flat `key = value` text with '#'
/// comments and exactly these keys:
///   topology   comb | fig1 | cycle | <path to topology file>
///   n, m       combination network parameters (topology = comb)
///   q, trials, max_rounds, seed, workers, tol
///   mode       arcnc | rlnc | both
///   out        output directory
///   override   kernel script path (optional)
struct CampaignConfig {
  std::string topology = "comb";
  std::size_t n = 4;
  std::size_t m = 2;
  std::uint64_t q = 2;
  std::size_t trials = 1000;
  std::size_t max_rounds = 64;
  std::uint64_t seed = 1;
  std::string mode = "arcnc";
  std::string out = "out";
  std::optional<std::string> override_path;
  std::size_t workers = 1;
  double tol = 1e-9;
};

/// Applies the `key = value` lines of `text` on top of `base`.
CampaignConfig parse_config(const std::string& text, CampaignConfig base = {});
/// Throws ValidationError on inconsistent settings.
void validate(const CampaignConfig& config);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

/// Combination networks (comb, fig1) report n; other topologies do not.
struct ResolvedTopology {
  Topology topology;
  std::optional<std::size_t> n;
  std::string label;
};
ResolvedTopology resolve_topology(const CampaignConfig& config);

void write_trials_csv(std::ostream& os, const Topology& topo, const std::vector<TrialResult>& results);
void write_trial_summary_csv(std::ostream& os, const std::vector<TrialResult>& results);
void write_rlnc_csv(std::ostream& os, const std::vector<RlncRow>& rows);
std::string trial_json(const TrialResult& result, int indent = 2);

/// Bounds table grid; each list is swept.
struct BoundsGrid {
  std::vector<std::uint64_t> m{2};
  std::vector<std::uint64_t> q{2, 8};
  std::vector<std::uint64_t> n{4};
  std::vector<std::uint64_t> d{1, 6};
  std::vector<std::uint64_t> eta{2, 4, 8};
  std::vector<std::uint64_t> t{0, 1, 2, 3};
  std::vector<double> eps{0.1};
  double tol = 1e-9;
};

struct BoundRow {
  std::string quantity;
  std::optional<std::uint64_t> m, q, n, d, eta, t;
  std::string value;  // "N/A" where the bound does not apply
  std::string mode;   // exact | float
};

std::vector<BoundRow> bounds_table(const BoundsGrid& grid);
void write_bounds_csv(std::ostream& os, const std::vector<BoundRow>& rows);

/// `gen`: kind is comb, fig1 or cycle.
std::string cmd_gen(const std::string& kind, std::size_t n, std::size_t m);

/// `trace`: steps one scripted trial, printing kernels, headers, verdicts
/// and ACK/freeze events to `os`. Coefficients missing from the script are
/// an error. Returns the trial result.
TrialResult cmd_trace(const CampaignConfig& config, std::ostream& os);

/// `run` / `compare`: writes trials.csv, trial_summary.csv, rlnc.csv (modes
/// rlnc and both) and summary.json under config.out. Returns the summary
/// JSON text.
std::string cmd_run(const CampaignConfig& config, std::ostream& log);

}  // namespace arcnc

#endif  // ARCNC_HARNESS_HPP
