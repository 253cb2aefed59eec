// arcnc: command-line front end (gen, trace, run, compare, bounds).

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "arcnc/harness.hpp"

namespace {

struct CampaignFlags {
  std::optional<std::string> config, topology, mode, out, override_path;
  std::optional<std::size_t> n, m, trials, max_rounds, workers;
  std::optional<std::uint64_t> q, seed;
  std::optional<double> tol;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "flat key = value config file");
    app.add_option("--topology", topology, "comb | fig1 | cycle | topology file");
    app.add_option("--n", n, "intermediate nodes (comb)");
    app.add_option("--m", m, "multicast rate (comb)");
    app.add_option("--q", q, "field order (prime or power of two)");
    app.add_option("--trials", trials, "number of trials");
    app.add_option("--max-rounds", max_rounds, "time steps per trial");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--out", out, "output directory (run) or file (trace)");
    app.add_option("--override", override_path, "kernel script");
    app.add_option("--mode", mode, "arcnc | rlnc | both");
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--tol", tol, "series truncation tolerance");
  }

  arcnc::CampaignConfig resolve() const {
    arcnc::CampaignConfig c;
    if (config) c = arcnc::parse_config(arcnc::read_file(*config), c);
    if (topology) c.topology = *topology;
    if (n) c.n = *n;
    if (m) c.m = *m;
    if (q) c.q = *q;
    if (trials) c.trials = *trials;
    if (max_rounds) c.max_rounds = *max_rounds;
    if (seed) c.seed = *seed;
    if (out) c.out = *out;
    if (override_path) c.override_path = *override_path;
    if (mode) c.mode = *mode;
    if (workers) c.workers = *workers;
    if (tol) c.tol = *tol;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive random convolutional network coding simulator"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a topology file");
  std::string gen_kind;
  std::size_t gen_n = 4, gen_m = 2;
  std::optional<std::string> gen_out;
  gen->add_option("kind", gen_kind, "comb | fig1 | cycle")->required();
  gen->add_option("--n", gen_n, "intermediate nodes");
  gen->add_option("--m", gen_m, "multicast rate");
  gen->add_option("--out", gen_out, "output file (default stdout)");

  auto* trace = app.add_subcommand("trace", "step one scripted trial and print every event");
  CampaignFlags trace_flags;
  trace_flags.attach(*trace);

  auto* run = app.add_subcommand("run", "Monte Carlo campaign");
  CampaignFlags run_flags;
  run_flags.attach(*run);

  auto* compare = app.add_subcommand("compare", "run with --mode both");
  CampaignFlags compare_flags;
  compare_flags.attach(*compare);

  auto* bounds = app.add_subcommand("bounds", "tabulate the analytic bounds");
  arcnc::BoundsGrid grid;
  std::optional<std::string> bounds_out;
  bounds->add_option("--m", grid.m, "multicast rates");
  bounds->add_option("--q", grid.q, "field orders");
  bounds->add_option("--n", grid.n, "intermediate counts");
  bounds->add_option("--d", grid.d, "sink counts");
  bounds->add_option("--eta", grid.eta, "random coefficient counts");
  bounds->add_option("--t", grid.t, "time indices");
  bounds->add_option("--eps", grid.eps, "failure tolerances");
  bounds->add_option("--tol", grid.tol, "series truncation tolerance");
  bounds->add_option("--out", bounds_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const std::string text = arcnc::cmd_gen(gen_kind, gen_n, gen_m);
      if (gen_out)
        arcnc::write_file(*gen_out, text);
      else
        std::cout << text;
    } else if (*trace) {
      arcnc::CampaignConfig c = trace_flags.resolve();
      if (!trace_flags.topology && !(trace_flags.config)) c.topology = "fig1";
      const auto result = arcnc::cmd_trace(c, std::cout);
      if (trace_flags.out) arcnc::write_file(*trace_flags.out, arcnc::trial_json(result));
      else std::cout << "\n" << arcnc::trial_json(result);
    } else if (*run || *compare) {
      arcnc::CampaignConfig c = (*run ? run_flags : compare_flags).resolve();
      if (*compare) c.mode = "both";
      arcnc::cmd_run(c, std::cerr);
    } else if (*bounds) {
      for (double eps : grid.eps)
        if (!(eps > 0 && eps < 1)) throw arcnc::ValidationError("eps must lie in (0, 1)");
      for (auto q : grid.q)
        if (q < 2) throw arcnc::ValidationError("field order must be at least 2");
      std::ostringstream os;
      arcnc::write_bounds_csv(os, arcnc::bounds_table(grid));
      if (bounds_out)
        arcnc::write_file(*bounds_out, os.str());
      else
        std::cout << os.str();
    }
  } catch (const arcnc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
