#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "arcnc/analysis.hpp"
#include "arcnc/harness.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace arcnc;
namespace fs = std::filesystem;

namespace {

const std::string kData = ARCNC_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("arcnc_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

int cli(const std::string& args) {
  const std::string cmd = std::string(ARCNC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const BoundRow* find_row(const std::vector<BoundRow>& rows, const std::string& quantity, std::uint64_t q,
                         std::uint64_t d, std::uint64_t eta, std::uint64_t t, const std::string& mode) {
  for (const auto& r : rows)
    if (r.quantity == quantity && r.q == q && r.d == d && r.eta == eta && r.t == t && r.mode == mode) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("config files") {
  const CampaignConfig c = parse_config("# comment\ntopology = fig1\nq = 8\n\ntrials=50  # inline\nmode = both\n");
  CHECK(c.topology == "fig1");
  CHECK(c.q == 8);
  CHECK(c.trials == 50);
  CHECK(c.mode == "both");
  CHECK(c.max_rounds == 64);
  CHECK_THROWS_AS(parse_config("colour = red\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("q = eight\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("just words\n"), ValidationError);
  CHECK_NOTHROW(parse_config(read_file(kData + "/example.conf")));

  CampaignConfig bad;
  bad.q = 6;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {};
  bad.mode = "fast";
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {};
  bad.n = 1;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {};
  bad.trials = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  CHECK_NOTHROW(validate(CampaignConfig{}));
  CHECK_THROWS_AS(read_file("/nonexistent/file"), IoError);
}

TEST_CASE("topology resolution") {
  CampaignConfig c;
  c.topology = "fig1";
  CHECK(resolve_topology(c).topology == combination_network(4, 2));
  CHECK(resolve_topology(c).n == std::optional<std::size_t>(4));
  c.topology = kData + "/cycle.topo";
  CHECK(resolve_topology(c).topology == cycle_network());
  CHECK_FALSE(resolve_topology(c).n.has_value());
  c.topology = "/nonexistent.topo";
  CHECK_THROWS_AS(resolve_topology(c), IoError);

  const fs::path dir = scratch("topo");
  write_file((dir / "cut.topo").string(), "nodes 3\nm 2\nsource 0\nsinks 2\nedge 0 1\nedge 1 2\nedge 0 2\nedge 0 2\n");
  write_file((dir / "thin.topo").string(), "nodes 3\nm 2\nsource 0\nsinks 2\nedge 0 1\nedge 1 2\n");
  c.topology = (dir / "cut.topo").string();
  CHECK_NOTHROW(resolve_topology(c));
  c.topology = (dir / "thin.topo").string();
  CHECK_THROWS_AS(resolve_topology(c), ValidationError);
}

TEST_CASE("gen") {
  CHECK(load_topology(cmd_gen("comb", 4, 2)) == combination_network(4, 2));
  CHECK(load_topology(cmd_gen("fig1", 0, 0)).node_count() == 11);
  CHECK(load_topology(cmd_gen("cycle", 0, 0)) == cycle_network());
  CHECK(cmd_gen("fig1", 0, 0) == read_file(kData + "/fig1.topo"));
  CHECK_THROWS_AS(cmd_gen("comb", 2, 3), ValidationError);
  CHECK_THROWS_AS(cmd_gen("star", 4, 2), ValidationError);
}

TEST_CASE("bounds table") {
  const auto rows = bounds_table(BoundsGrid{});
  const BoundRow* r = find_row(rows, "ho_bound", 8, 1, 2, 0, "exact");
  REQUIRE(r);
  CHECK(r->value == "49/64");
  r = find_row(rows, "ho_bound", 2, 6, 4, 1, "exact");
  REQUIRE(r);
  CHECK(r->value == "N/A");
  r = find_row(rows, "ho_bound", 2, 6, 4, 2, "exact");
  REQUIRE(r);
  CHECK(r->value == "1/256");
  bool et = false;
  for (const auto& row : rows)
    if (row.quantity == "et_upper" && row.q == 2u && row.m == 2u && row.mode == "exact") {
      CHECK(row.value == "5/3");
      et = true;
    }
  CHECK(et);
  std::ostringstream os;
  write_bounds_csv(os, rows);
  CHECK(first_line(os.str()) == "quantity,m,q,n,d,eta,t,value,mode");
}

TEST_CASE("trace of the fig1 script") {
  CampaignConfig c;
  c.topology = "fig1";
  c.override_path = kData + "/fig1.kernel";
  std::ostringstream os;
  const TrialResult r = cmd_trace(c, os);
  CHECK(r.max_stopping_time == std::optional<std::size_t>(1));
  const std::string out = os.str();
  CHECK(out.find("stopping times: 0 0 0 0 0 1 (avg 1/6)") != std::string::npos);
  CHECK(out.find("source code lengths: 1 1 2 2 (avg 3/2)") != std::string::npos);
  CHECK(out.find("average memory: 42/11 bits") != std::string::npos);
  CHECK(out.find("random coefficients: 8 pairs on 4 links") != std::string::npos);

  const auto j = nlohmann::json::parse(trial_json(r));
  CHECK(j["stopping_times"] == nlohmann::json::array({0, 0, 0, 0, 0, 1}));
  CHECK(j["verification"]["decode_ok"] == true);

  // dropping the t = 1 lines leaves the protocol short of coefficients
  const fs::path dir = scratch("trace");
  std::string script = read_file(kData + "/fig1.kernel");
  std::istringstream in(script);
  std::string line, truncated;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string k, input, out_edge;
    std::size_t t = 0;
    if (ls >> k >> input >> out_edge >> t && k == "k" && t == 1) continue;
    truncated += line + "\n";
  }
  write_file((dir / "short.kernel").string(), truncated);
  c.override_path = (dir / "short.kernel").string();
  std::ostringstream sink;
  CHECK_THROWS_AS(cmd_trace(c, sink), ValidationError);

  write_file((dir / "id.kernel").string(), "k s0 0 0 1\nk s0 1 0 1\n");
  c.topology = "comb";
  c.n = 2;
  c.m = 1;
  c.override_path = (dir / "id.kernel").string();
  const TrialResult id = cmd_trace(c, sink);
  CHECK(id.stopping_times == std::vector<std::optional<std::size_t>>{0, 0});
  CHECK(id.decode_delay == std::vector<std::optional<std::size_t>>{0, 0});
}

TEST_CASE("run writes reproducible outputs") {
  const fs::path a = scratch("run_a"), b = scratch("run_b");
  CampaignConfig c;
  c.trials = 300;
  c.max_rounds = 16;
  c.seed = 5;
  c.mode = "both";
  c.out = a.string();
  std::ostringstream log;
  const std::string ja = cmd_run(c, log);
  c.out = b.string();
  c.workers = 2;
  const std::string jb = cmd_run(c, log);
  for (const char* f : {"trials.csv", "trial_summary.csv", "rlnc.csv", "summary.json"})
    CHECK(read_file((a / f).string()) == read_file((b / f).string()));
  CHECK(first_line(read_file((a / "trials.csv").string())) == "trial,seed,sink,T_i,T_N,success");
  CHECK(first_line(read_file((a / "trial_summary.csv").string())) == "trial,avg_T,avg_code_len,avg_memory_bits,rounds");
  CHECK(first_line(read_file((a / "rlnc.csv").string())) == "q,sink,success_fraction,ho_bound");

  const auto j = nlohmann::json::parse(read_file((a / "summary.json").string()));
  CHECK(j.contains("rlnc"));
  CHECK(j.contains("arcnc"));
  CHECK(j["arcnc"]["eta"] == 8);
  CHECK(j["arcnc"]["verification"]["decode_failures"] == 0);
  CHECK(j["arcnc"]["verification"]["header_failures"] == 0);
  CHECK(j["analysis"]["et_upper_exact"] == "5/3");
  CHECK(j["rlnc"]["check_q8"]["expected"] == "441/512");
  CHECK(j["literature"]["label"] == "literature value");

  const fs::path r = scratch("run_rlnc");
  c.mode = "rlnc";
  c.out = r.string();
  const auto jr = nlohmann::json::parse(cmd_run(c, log));
  CHECK_FALSE(jr.contains("arcnc"));
  CHECK_FALSE(fs::exists(r / "trials.csv"));

  c.mode = "both";
  c.topology = "cycle";
  CHECK_THROWS_AS(cmd_run(c, log), ValidationError);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string d = dir.string();
  CHECK(cli("gen comb --n 4 --m 2 --out " + d + "/c.topo") == 0);
  CHECK(cli("gen comb --n 2 --m 3") == 1);
  CHECK(cli("bogus") == 1);
  CHECK(cli("run --q 6 --out " + d) == 1);
  CHECK(cli("run --topology /nonexistent.topo --out " + d) == 2);
  CHECK(cli("run --trials 20 --out " + d + "/run") == 0);
  CHECK(fs::exists(dir / "run" / "summary.json"));
  CHECK(cli("trace --override " + kData + "/fig1.kernel --out " + d + "/t.json") == 0);
  CHECK(cli("trace --override /nonexistent.kernel") == 2);
  CHECK(cli("bounds --q 2 --m 2 --out " + d + "/b.csv") == 0);
  CHECK(cli("bounds --eps 1.5") == 1);
  CHECK(cli("compare --trials 20 --out " + d + "/cmp") == 0);
  CHECK(fs::exists(dir / "cmp" / "rlnc.csv"));
  CHECK(cli("--help") == 0);
}
