#include "arcnc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "arcnc/analysis.hpp"
#include "json.hpp"

namespace arcnc {

using json = nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ValidationError("bad value for " + key + ": '" + value + "'");
  return out;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt_opt(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : "NA"; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_power_of_two(std::uint64_t q) { return q && !(q & (q - 1)); }

}  // namespace

// ------------------------------------------------------------- config

CampaignConfig parse_config(const std::string& text, CampaignConfig c) {
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key == "topology") c.topology = value;
    else if (key == "n") c.n = parse_number<std::size_t>(key, value);
    else if (key == "m") c.m = parse_number<std::size_t>(key, value);
    else if (key == "q") c.q = parse_number<std::uint64_t>(key, value);
    else if (key == "trials") c.trials = parse_number<std::size_t>(key, value);
    else if (key == "max_rounds") c.max_rounds = parse_number<std::size_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "workers") c.workers = parse_number<std::size_t>(key, value);
    else if (key == "tol") c.tol = parse_number<double>(key, value);
    else if (key == "mode") c.mode = value;
    else if (key == "out") c.out = value;
    else if (key == "override") c.override_path = value;
    else throw ValidationError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
  }
  return c;
}

void validate(const CampaignConfig& c) {
  if (c.trials == 0) throw ValidationError("trials must be at least 1");
  if (c.max_rounds == 0) throw ValidationError("max_rounds must be at least 1");
  if (c.workers == 0) throw ValidationError("workers must be at least 1");
  if (!(c.tol > 0)) throw ValidationError("tol must be positive");
  if (c.mode != "arcnc" && c.mode != "rlnc" && c.mode != "both")
    throw ValidationError("mode must be arcnc, rlnc or both");
  try {
    Field f(c.q);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (c.topology == "comb" && (c.m == 0 || c.n < c.m))
    throw ValidationError("combination network needs n >= m >= 1");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("write failed: " + path);
}

ResolvedTopology resolve_topology(const CampaignConfig& c) {
  ResolvedTopology r;
  if (c.topology == "comb") {
    if (c.m == 0 || c.n < c.m) throw ValidationError("combination network needs n >= m >= 1");
    if (binomial(c.n, c.m) > 200000) throw ValidationError("combination network has too many sinks");
    r.topology = combination_network(c.n, c.m);
    r.n = c.n;
    r.label = "combination(" + std::to_string(c.n) + "," + std::to_string(c.m) + ")";
  } else if (c.topology == "fig1") {
    r.topology = combination_network(4, 2);
    r.n = 4;
    r.label = "combination(4,2)";
  } else if (c.topology == "cycle") {
    r.topology = cycle_network();
    r.label = "cycle";
  } else {
    try {
      r.topology = load_topology(read_file(c.topology));
    } catch (const TopologyError& e) {
      throw ValidationError(c.topology + ": " + e.what());
    }
    r.label = c.topology;
  }
  const auto report = validate_multicast(r.topology);
  if (!report.ok()) {
    std::string ids;
    for (NodeId s : report.failing) ids += " " + std::to_string(s);
    throw ValidationError("min-cut below the rate at sink(s)" + ids);
  }
  return r;
}

// ---------------------------------------------------------------- CSV

void write_trials_csv(std::ostream& os, const Topology& topo, const std::vector<TrialResult>& results) {
  os << "trial,seed,sink,T_i,T_N,success\n";
  for (const auto& r : results)
    for (std::size_t s = 0; s < r.stopping_times.size(); ++s)
      os << r.trial << ',' << r.seed << ',' << topo.sinks()[s] << ',' << fmt_opt(r.stopping_times[s]) << ','
         << fmt_opt(r.max_stopping_time) << ',' << (r.success ? 1 : 0) << '\n';
}

void write_trial_summary_csv(std::ostream& os, const std::vector<TrialResult>& results) {
  os << "trial,avg_T,avg_code_len,avg_memory_bits,rounds\n";
  for (const auto& r : results)
    os << r.trial << ',' << fmt(r.avg_stopping_time) << ',' << fmt(r.avg_code_length) << ','
       << fmt(r.avg_memory_bits) << ',' << r.rounds << '\n';
}

void write_rlnc_csv(std::ostream& os, const std::vector<RlncRow>& rows) {
  os << "q,sink,success_fraction,ho_bound\n";
  for (const auto& r : rows)
    os << r.q << ',' << (r.sink ? std::to_string(*r.sink) : "all") << ',' << fmt(r.fraction) << ','
       << (r.ho_bound ? fmt(*r.ho_bound) : "N/A") << '\n';
}

namespace {

json to_json(const TrialResult& r) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["trial"] = r.trial;
  j["seed"] = r.seed;
  j["success"] = r.success;
  j["rounds"] = r.rounds;
  json ts = json::array();
  for (const auto& t : r.stopping_times) ts.push_back(opt(t));
  j["stopping_times"] = ts;
  j["max_stopping_time"] = opt(r.max_stopping_time);
  j["avg_stopping_time"] = std::isnan(r.avg_stopping_time) ? json(nullptr) : json(r.avg_stopping_time);
  j["code_length"] = r.code_length;
  j["avg_code_length"] = r.avg_code_length;
  j["constraint_length"] = r.constraint_length;
  j["memory_bits"] = r.memory_bits;
  j["avg_memory_bits"] = r.avg_memory_bits;
  j["eta"] = r.eta;
  j["eta_links"] = r.eta_links;
  json v;
  v["performed"] = r.verified;
  v["headers_consistent"] = r.headers_consistent;
  v["decode_ok"] = r.decode_ok;
  json delays = json::array();
  for (const auto& d : r.decode_delay) delays.push_back(opt(d));
  v["decode_delay"] = delays;
  v["decode_columns"] = r.decode_columns;
  v["decode_mismatches"] = r.decode_mismatches;
  j["verification"] = v;
  return j;
}

}  // namespace

std::string trial_json(const TrialResult& result, int indent) { return to_json(result).dump(indent) + "\n"; }

// ------------------------------------------------------------- bounds

std::vector<BoundRow> bounds_table(const BoundsGrid& g) {
  std::vector<BoundRow> rows;
  auto both = [&](BoundRow base, const std::optional<Rational>& exact) {
    if (!exact) {
      base.value = "N/A";
      base.mode = "exact";
      rows.push_back(base);
      base.mode = "float";
      rows.push_back(base);
      return;
    }
    base.value = to_string(*exact);
    base.mode = "exact";
    rows.push_back(base);
    base.value = fmt(static_cast<double>(*exact));
    base.mode = "float";
    rows.push_back(base);
  };
  auto floating = [&](BoundRow base, double v) {
    base.value = fmt(v);
    base.mode = "float";
    rows.push_back(base);
  };

  for (auto d : g.d)
    for (auto q : g.q)
      for (auto eta : g.eta) {
        for (auto t : g.t) {
          BoundRow r{"ho_bound", {}, q, {}, d, eta, t, "", ""};
          both(r, ho_bound<Rational>(d, q, eta, t));
        }
        for (double eps : g.eps) {
          BoundRow r{"t0_for_epsilon(eps=" + fmt(eps) + ")", {}, q, {}, d, eta, {}, "", "exact"};
          r.value = std::to_string(t0_for_epsilon(d, q, eta, eps));
          rows.push_back(r);
        }
        floating({"etn_upper", {}, q, {}, d, eta, {}, "", ""}, etn_upper(d, q, eta, g.tol));
      }

  for (auto m : g.m)
    for (auto q : g.q) {
      for (auto t : g.t) both({"full_rank_prob_Q", m, q, {}, {}, {}, t, "", ""}, full_rank_prob_Q<Rational>(q, m, t));
      floating({"exact_ET", m, q, {}, {}, {}, {}, "", ""}, exact_ET(q, m, g.tol));
      both({"et_upper", m, q, {}, {}, {}, {}, "", ""}, et_upper<Rational>(m, q));
      both({"et_lower", m, q, {}, {}, {}, {}, "", ""}, et_lower<Rational>(m, q));
      both({"et2_upper", m, q, {}, {}, {}, {}, "", ""}, et2_upper<Rational>(m, q));
      both({"rho_upper", m, q, {}, {}, {}, {}, "", ""}, rho_upper<Rational>(m, q));
      for (std::uint64_t l = 1; l < m; ++l)
        both({"rho_lambda_upper(lambda=" + std::to_string(l) + ")", m, q, {}, {}, {}, {}, "", ""},
             rho_lambda_upper<Rational>(m, l, q));
      for (auto n : g.n) {
        if (n < m) continue;
        both({"var_upper", m, q, n, binomial(n, m), {}, {}, "", ""}, var_upper<Rational>(n, m, q));
      }
    }

  for (auto m : g.m)
    for (auto n : g.n) {
      if (m == 0 || n < m) continue;
      BoundRow r{"shared_parent_count", m, {}, n, binomial(n, m), {}, {}, "", "exact"};
      r.value = std::to_string(shared_parent_count(n, m));
      rows.push_back(r);
      both({"shared_parent_fraction", m, {}, n, binomial(n, m), {}, {}, "", ""}, shared_parent_fraction(n, m));
    }
  return rows;
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundRow>& rows) {
  auto cell = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); };
  os << "quantity,m,q,n,d,eta,t,value,mode\n";
  for (const auto& r : rows)
    os << r.quantity << ',' << cell(r.m) << ',' << cell(r.q) << ',' << cell(r.n) << ',' << cell(r.d) << ','
       << cell(r.eta) << ',' << cell(r.t) << ',' << r.value << ',' << r.mode << '\n';
}

// ---------------------------------------------------------------- gen

std::string cmd_gen(const std::string& kind, std::size_t n, std::size_t m) {
  if (kind == "comb") {
    if (m == 0 || n < m) throw ValidationError("combination network needs n >= m >= 1");
    if (binomial(n, m) > 200000) throw ValidationError("combination network has too many sinks");
    return save_topology(combination_network(n, m));
  }
  if (kind == "fig1") return save_topology(combination_network(4, 2));
  if (kind == "cycle") return save_topology(cycle_network());
  throw ValidationError("unknown topology kind '" + kind + "' (comb, fig1, cycle)");
}

// -------------------------------------------------------------- trace

namespace {

std::string row_string(const RowVector& v) {
  std::string s = "[";
  for (Eigen::Index j = 0; j < v.size(); ++j) s += (j ? " " : "") + std::to_string(v(j));
  return s + "]";
}

std::string matrix_string(const ScalarMatrix& a) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < a.cols(); ++j) s += (j ? " " : "") + std::to_string(a(i, j));
  }
  return s + "]";
}

// Exact average when every term is an integer.
std::string exact_average(std::uint64_t sum, std::uint64_t count) {
  return to_string(Rational(sum) / Rational(count));
}

}  // namespace

TrialResult cmd_trace(const CampaignConfig& config, std::ostream& os) {
  if (!config.override_path) throw ValidationError("trace needs a kernel script (--override)");
  if (config.max_rounds == 0) throw ValidationError("max_rounds must be at least 1");
  Field field = [&] {
    try {
      return Field(config.q);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
  }();
  const ResolvedTopology rt = resolve_topology(config);
  const Topology& topo = rt.topology;

  SimConfig sc;
  sc.topology = topo;
  sc.field = field;
  sc.max_rounds = config.max_rounds;
  sc.base_seed = config.seed;
  try {
    sc.kernel_override = KernelOverride::parse(read_file(*config.override_path));
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  sc.kernel_override->strict = true;

  os << "topology " << rt.label << ": " << topo.node_count() << " nodes, " << topo.edge_count() << " edges, "
     << topo.sinks().size() << " sinks, m = " << topo.rate() << ", field " << field.describe() << "\n";

  TrialResult result;
  try {
    Simulation sim(sc, 0);
    while (sim.time() < sc.max_rounds) {
      const StepReport& rep = sim.step();
      const std::size_t t = rep.t;
      os << "\nt = " << t << "\n";
      for (const auto& d : rep.draws)
        os << "  k" << describe(d.pair) << "[" << t << "] = " << d.value << (d.scripted ? "" : "  (random)") << "\n";
      for (EdgeId e = 0; e < topo.edge_count(); ++e)
        os << "  edge " << e << " (" << topo.edge(e).from << "->" << topo.edge(e).to << "): y = " << sim.symbol(e, t)
           << ", f = " << row_string(sim.header(e, t)) << "\n";
      for (const auto& v : rep.sinks) {
        os << "  sink " << v.sink << ": F_" << t << " = " << matrix_string(v.block);
        if (v.newly_decoded)
          os << ", rank increment " << v.rank_increment << ", decodable (T = " << t << ")\n";
        else if (v.decodable)
          os << ", decoded earlier\n";
        else
          os << ", rank condition " << (v.rank_condition ? "met" : "not met") << ", rank increment "
             << v.rank_increment << ", not decodable\n";
      }
      if (!rep.newly_acked.empty()) {
        os << "  ack:";
        for (NodeId v : rep.newly_acked) os << ' ' << v;
        os << "\n";
      }
      if (!rep.newly_frozen.empty()) {
        os << "  frozen:";
        for (EdgeId e : rep.newly_frozen) os << ' ' << e;
        os << "\n";
      }
      if (sim.all_decoded()) break;
    }
    result = sim.finish();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }

  os << "\nstopping times:";
  std::uint64_t t_sum = 0;
  for (const auto& t : result.stopping_times) {
    os << ' ' << fmt_opt(t);
    t_sum += t.value_or(0);
  }
  if (result.success) os << " (avg " << exact_average(t_sum, result.stopping_times.size()) << ")";
  os << "\nsource code lengths:";
  std::uint64_t c_sum = 0;
  for (EdgeId e : topo.out_edges(topo.source())) {
    os << ' ' << result.code_length[e];
    c_sum += result.code_length[e];
  }
  if (!topo.out_edges(topo.source()).empty())
    os << " (avg " << exact_average(c_sum, topo.out_edges(topo.source()).size()) << ")";
  os << "\naverage memory: ";
  if (is_power_of_two(config.q)) {
    std::uint64_t bits = 0;
    for (double b : result.memory_bits) bits += static_cast<std::uint64_t>(std::llround(b));
    os << exact_average(bits, result.memory_bits.size());
  } else {
    os << fmt(result.avg_memory_bits);
  }
  os << " bits\nrandom coefficients: " << result.eta << " pairs on " << result.eta_links << " links\n";
  if (result.verified) {
    os << "verification: headers " << (result.headers_consistent ? "consistent" : "INCONSISTENT") << ", decoding "
       << (result.decode_ok ? "exact" : "FAILED") << ", delays";
    for (const auto& d : result.decode_delay) os << ' ' << fmt_opt(d);
    os << "\n";
  }
  return result;
}

// ---------------------------------------------------------------- run

std::string cmd_run(const CampaignConfig& config, std::ostream& log) {
  validate(config);
  const ResolvedTopology rt = resolve_topology(config);
  const Topology& topo = rt.topology;
  const Field field(config.q);
  const std::size_t m = topo.rate(), d = topo.sinks().size();
  const std::filesystem::path out(config.out);

  json summary;
  summary["config"] = {{"topology", config.topology},
                       {"q", config.q},
                       {"trials", config.trials},
                       {"max_rounds", config.max_rounds},
                       {"seed", config.seed},
                       {"mode", config.mode},
                       {"override", config.override_path ? json(*config.override_path) : json(nullptr)},
                       {"tol", config.tol}};
  summary["topology"] = {{"label", rt.label},
                         {"nodes", topo.node_count()},
                         {"edges", topo.edge_count()},
                         {"sinks", d},
                         {"m", m},
                         {"n", rt.n ? json(*rt.n) : json(nullptr)},
                         {"acyclic", is_acyclic(topo).acyclic}};

  if (config.mode != "rlnc") {
    SimConfig sc;
    sc.topology = topo;
    sc.field = field;
    sc.max_rounds = config.max_rounds;
    sc.base_seed = config.seed;
    if (config.override_path) {
      try {
        sc.kernel_override = KernelOverride::parse(read_file(*config.override_path));
      } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
      }
    }
    std::vector<TrialResult> results;
    try {
      results = run_trials(sc, config.trials, config.workers);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    std::ostringstream trials_csv, summary_csv;
    write_trials_csv(trials_csv, topo, results);
    write_trial_summary_csv(summary_csv, results);
    write_file((out / "trials.csv").string(), trials_csv.str());
    write_file((out / "trial_summary.csv").string(), summary_csv.str());

    const CampaignSummary cs = summarize(results, config.max_rounds);
    json a;
    a["trials"] = cs.trials;
    a["successes"] = cs.successes;
    a["eta"] = cs.eta;
    a["eta_links"] = cs.eta_links;
    a["mean_avg_T"] = cs.mean_avg_T;
    a["var_avg_T"] = cs.var_avg_T;
    a["se_avg_T"] = cs.se_avg_T;
    a["se_var_avg_T"] = cs.se_var_avg_T;
    a["mean_T_i"] = cs.mean_T_i;
    a["mean_T_i_sq"] = cs.mean_T_i_sq;
    a["success_by_t"] = cs.success_by_t;
    a["sink_success_by_t"] = cs.sink_success_by_t;
    a["tn_histogram"] = cs.tn_histogram;
    a["mean_avg_code_length"] = cs.mean_avg_code_length;
    a["mean_avg_memory_bits"] = cs.mean_avg_memory_bits;
    a["mean_constraint_length"] = cs.mean_constraint_length;
    a["verification"] = {{"verified_trials", cs.verified_trials},
                         {"header_failures", cs.header_failures},
                         {"decode_failures", cs.decode_failures},
                         {"delay_above_stopping_time", cs.delay_above_stopping_time}};
    summary["arcnc"] = a;

    json an;
    an["et_upper"] = et_upper<double>(m, config.q);
    an["et_upper_exact"] = to_string(et_upper<Rational>(m, config.q));
    an["et_lower"] = et_lower<double>(m, config.q);
    an["et_lower_exact"] = to_string(et_lower<Rational>(m, config.q));
    an["exact_ET"] = exact_ET(config.q, m, config.tol);
    an["et2_upper"] = et2_upper<double>(m, config.q);
    an["rho_upper"] = opt_json(rho_upper<double>(m, config.q));
    an["var_upper"] = rt.n ? json(var_upper<double>(*rt.n, m, config.q)) : json(nullptr);
    an["etn_upper"] = etn_upper(d, config.q, cs.eta, config.tol);
    json ho = json::array();
    for (std::size_t t = 0; t < config.max_rounds; ++t)
      ho.push_back({{"t", t}, {"value", opt_json(ho_bound<double>(d, config.q, cs.eta, t))}});
    an["ho_bound_by_t"] = ho;
    summary["analysis"] = an;

    const double exact = an["exact_ET"].get<double>(), upper = an["et_upper"].get<double>();
    summary["checks"] = {
        {"mean_avg_T_within_3se_of_exact_ET", std::abs(cs.mean_avg_T - exact) <= 3 * cs.se_avg_T},
        {"mean_avg_T_le_et_upper_plus_3se", cs.mean_avg_T <= upper + 3 * cs.se_avg_T},
        {"var_avg_T_le_var_upper",
         rt.n ? json(cs.var_avg_T <= var_upper<double>(*rt.n, m, config.q)) : json(nullptr)}};
    log << "arcnc: " << cs.successes << "/" << cs.trials << " trials decoded, mean avg T = " << fmt(cs.mean_avg_T)
        << " (se " << fmt(cs.se_avg_T) << ")\n";
  }

  if (config.mode != "arcnc") {
    if (!is_acyclic(topo).acyclic) throw ValidationError("the RLNC baseline needs an acyclic topology");
    std::vector<std::uint64_t> qs{2, 4, 8, 16, 256, config.q};
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    const auto rows = rlnc_success_curve(topo, qs, config.trials, config.seed, config.workers);
    std::ostringstream rlnc_csv;
    write_rlnc_csv(rlnc_csv, rows);
    write_file((out / "rlnc.csv").string(), rlnc_csv.str());

    json r;
    r["trials"] = config.trials;
    json curve = json::array(), attempts = json::array(), theory = json::array();
    for (std::uint64_t q : qs) {
      std::size_t succ = 0, total = 0;
      double overall = 0;
      for (const auto& row : rows) {
        if (row.q != q) continue;
        curve.push_back({{"q", q},
                         {"sink", row.sink ? json(topo.sinks()[*row.sink]) : json("all")},
                         {"successes", row.successes},
                         {"success_fraction", row.fraction},
                         {"se", row.se},
                         {"ho_bound", opt_json(row.ho_bound)}});
        if (row.sink) {
          succ += row.successes;
          total += row.trials;
        } else {
          overall = row.fraction;
        }
      }
      const double per_sink = total ? static_cast<double>(succ) / static_cast<double>(total) : 0.0;
      attempts.push_back({{"q", q},
                          {"per_sink", per_sink > 0 ? json(1 / per_sink) : json(nullptr)},
                          {"all_sinks", overall > 0 ? json(1 / overall) : json(nullptr)}});
      theory.push_back({{"q", q},
                        {"value", full_rank_prob_Q<double>(q, m, 1)},
                        {"exact", to_string(full_rank_prob_Q<Rational>(q, m, 1))},
                        {"memory_bits_per_node", static_cast<double>(m) * Field(q).log2_order()}});
    }
    r["curve"] = curve;
    r["random_matrix_full_rank"] = theory;
    r["expected_attempts"] = {{"label", "derived quantity: 1 / one-shot success fraction"}, {"values", attempts}};
    if (rt.n) {
      // Each sink of a combination network sees m independent uniform
      // vectors, so its success probability is the full-rank probability.
      std::size_t succ = 0, total = 0;
      for (const auto& row : rows)
        if (row.q == 8 && row.sink) {
          succ += row.successes;
          total += row.trials;
        }
      const double p = static_cast<double>(succ) / static_cast<double>(total);
      const double expected = full_rank_prob_Q<double>(8, m, 1);
      const double se = std::sqrt(expected * (1 - expected) / static_cast<double>(total));
      r["check_q8"] = {{"expected", to_string(full_rank_prob_Q<Rational>(8, m, 1))},
                       {"expected_value", expected},
                       {"observed_per_sink_fraction", p},
                       {"draws", total},
                       {"se", se},
                       {"within_3se", std::abs(p - expected) <= 3 * se}};
    }
    summary["rlnc"] = r;
    log << "rlnc: success curve over " << qs.size() << " field sizes written\n";
  }

  if (rt.n) {
    summary["literature"] = {{"label", "literature value"},
                             {"scheme", "deterministic binary network code"},
                             {"decoding_delay", 1},
                             {"memory_bits_per_node", 4},
                             {"min_block_length", *rt.n - m}};
  }

  const std::string text = summary.dump(2) + "\n";
  write_file((out / "summary.json").string(), text);
  log << "wrote " << out.string() << "\n";
  return text;
}

}  // namespace arcnc
