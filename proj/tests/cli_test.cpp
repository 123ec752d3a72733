#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef SEPFLOW_CLI_PATH
#error "SEPFLOW_CLI_PATH must point at the command-line binary"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args, const std::string& env = "") {
  std::string cmd = env;
  if (!cmd.empty()) cmd += ' ';
  cmd += '\'';
  cmd += SEPFLOW_CLI_PATH;
  cmd += "' ";
  cmd += args;
  cmd += " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

// Two triangles joined by one bridge edge.
const char* kDumbbellText =
    "0 1 1.0\n0 2 1.0\n1 2 1.0\n3 4 1.0\n3 5 1.0\n4 5 1.0\n2 3 1.0\n";

const char* kK6Text =
    "0 1 1\n0 2 1\n0 3 1\n0 4 1\n0 5 1\n1 2 1\n1 3 1\n1 4 1\n1 5 1\n"
    "2 3 1\n2 4 1\n2 5 1\n3 4 1\n3 5 1\n4 5 1\n";

std::string solve_args(const fs::path& graph) {
  return "solve --input '" + graph.string() +
         "' --c 0.25 --c-prime 0.2 --a-const 0.1 --b-const 11.358 --cap 50 --runs 2 "
         "--retries 4 --seed 5";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with status two") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("solve").code == 2);                      // --input is required
  CHECK(run_cli("solve --input x --no-such-flag").code == 2);
  CHECK(run_cli("solve --help").code == 0);
  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("file problems exit with status one") {
  CHECK(run_cli("solve --input /nonexistent/graph.txt").code == 1);
  fs::path bad = write_temp("sepflow_cli_bad_graph.txt", "p 2 1\ne 1 5 1.0\n");
  CHECK(run_cli("matching --input '" + bad.string() + "'").code == 1);
  fs::remove(bad);
}

TEST_CASE("parameter validation exits with status two") {
  fs::path g = write_temp("sepflow_cli_k6.txt", kK6Text);
  CHECK(run_cli("solve --input '" + g.string() + "' --c 0.7").code == 2);
  CHECK(run_cli("harvest --input '" + g.string() + "' --option 3").code == 2);
  CHECK(run_cli("solve --input '" + g.string() + "' --format yaml").code == 2);
  fs::remove(g);
}

TEST_CASE("concentration reports the proved bound") {
  CmdResult r = run_cli("concentration --trials 2000 --seed 4");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["omega"] == 0.5);
  CHECK(j["delta"] == 0.5);
  CHECK(j["lower_bound"] == 0.0625);
  CHECK(j["trials"] == 2000);
  double est = j["estimate"].get<double>();
  CHECK(est > 0.0);
  CHECK(est < 1.0);
  CHECK(j["stderr"].get<double>() > 0.0);

  // Byte-identical rerun, and the seed environment variable is honored.
  CmdResult again = run_cli("concentration --trials 2000 --seed 4");
  CHECK(again.out == r.out);
  CmdResult via_env = run_cli("concentration --trials 2000", "SEPFLOW_SEED=4");
  CHECK(via_env.out == r.out);
  CmdResult other = run_cli("concentration --trials 2000 --seed 5");
  CHECK(other.out != r.out);
}

TEST_CASE("solve emits the full report schema") {
  fs::path g = write_temp("sepflow_cli_dumbbell.txt", kDumbbellText);
  CmdResult r = run_cli(solve_args(g));
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.contains("config"));
  REQUIRE(j.contains("result"));
  REQUIRE(j.contains("timings"));
  CHECK(j["config"]["c"] == 0.25);
  CHECK(j["config"]["seed"] == 5);

  const json& res = j["result"];
  std::string status = res["status"].get<std::string>();
  CHECK((status == "cut" || status == "lower_bound" || status == "inconclusive"));
  CHECK(res["n"] == 6);
  REQUIRE(res["alpha_grid"].is_array());
  CHECK(res["alpha_grid"][0] == 1.0);
  REQUIRE(res["alphas"].is_array());
  REQUIRE_FALSE(res["alphas"].empty());
  for (const json& a : res["alphas"]) {
    CHECK(a.contains("outcome"));
    CHECK(a.contains("iterations"));
    CHECK(a.contains("tallies"));
    CHECK(a.contains("verify"));
    CHECK_FALSE(a.contains("ms"));  // wall clock lives under timings only
  }
  if (status == "cut") {
    REQUIRE(res["cut"].is_object());
    CHECK(res["cut"]["nodes"].is_array());
    CHECK(res["cut"]["value"].is_number());
    CHECK(res["cut"]["expansion"].is_number());
  }
  CHECK(j["timings"].contains("total_ms"));
  fs::remove(g);
}

TEST_CASE("solve reruns agree outside the timing block") {
  fs::path g = write_temp("sepflow_cli_dumbbell2.txt", kDumbbellText);
  json a = json::parse(run_cli(solve_args(g)).out);
  json b = json::parse(run_cli(solve_args(g)).out);
  CHECK(a["config"].dump() == b["config"].dump());
  CHECK(a["result"].dump() == b["result"].dump());

  // Worker count must not leak into the result either.
  json c = json::parse(run_cli(solve_args(g) + " --workers 4").out);
  CHECK(a["result"].dump() == c["result"].dump());
  fs::remove(g);
}

TEST_CASE("alpha override runs a single threshold") {
  fs::path g = write_temp("sepflow_cli_dumbbell3.txt", kDumbbellText);
  CmdResult r = run_cli(solve_args(g) + " --alpha 0.75");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["result"]["alpha_grid"].size() == 1);
  CHECK(j["result"]["alpha_grid"][0] == 0.75);
  CHECK(j["result"]["alphas"].size() == 1);
  fs::remove(g);
}

TEST_CASE("matching subcommand dumps one oracle call") {
  fs::path g = write_temp("sepflow_cli_k6b.txt", kK6Text);
  std::string base = "matching --input '" + g.string() +
                     "' --alpha 0.05 --c-prime 0.2 --delta 0.25 --sigma 0.05 --seed 2";
  CmdResult r = run_cli(base);
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  std::string kind = j["kind"].get<std::string>();
  CHECK((kind == "cut" || kind == "saturated_flow" || kind == "matched"));
  CHECK(j["pi"].get<double>() > 0.0);
  CHECK(j["n_active"] == 6);
  CHECK(j["a_side"].is_array());
  CHECK(j["b_side"].is_array());

  CmdResult text = run_cli(base + " --format text");
  CHECK(text.out.find("kind: ") == 0);
  CmdResult csv = run_cli(base + " --format csv");
  CHECK(csv.out.rfind("kind,pi,n_active,", 0) == 0);
  fs::remove(g);
}

TEST_CASE("harvest subcommand reports per-run stats") {
  fs::path g = write_temp("sepflow_cli_k6c.txt", kK6Text);
  CmdResult r = run_cli("harvest --input '" + g.string() +
                        "' --alpha 0.05 --c-prime 0.2 --delta 0.25 --sigma 0.05 --runs 3 --K 2 "
                        "--seed 6");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j["runs"].size() == 3);
  for (const json& s : j["runs"]) {
    CHECK(s["raw_paths"].get<int>() >= s["violating_paths"].get<int>());
  }
  CHECK(j.contains("paths"));
  CHECK(j.contains("skipped_revisit_spans"));
  if (j["terminated"].get<bool>()) {
    CHECK(j["termination_run"].get<int>() >= 0);
    CHECK(j.contains("termination"));
  }
  fs::remove(g);
}

TEST_CASE("bench subcommand compares the two samplers") {
  fs::path g = write_temp("sepflow_cli_k6d.txt", kK6Text);
  CmdResult r = run_cli("bench-chaining --input '" + g.string() +
                        "' --K 2 --trials 5 --alpha 0.05 --c-prime 0.2 --delta 0.25 "
                        "--sigma 0.05 --seed 3");
  REQUIRE(r.code == 0);
  json j = json::parse(r.out);
  REQUIRE(j.size() == 2);
  CHECK(j[0]["method"] == "correlated-chain");
  CHECK(j[1]["method"] == "bit-pattern");
  for (const json& row : j) CHECK(row["trials"] == 5);
  fs::remove(g);
}

TEST_CASE("text and csv formats stay in step with json") {
  fs::path g = write_temp("sepflow_cli_dumbbell4.txt", kDumbbellText);
  CmdResult text = run_cli(solve_args(g) + " --format text");
  REQUIRE(text.code == 0);
  CHECK(text.out.find("status: ") == 0);
  CmdResult csv = run_cli(solve_args(g) + " --format csv");
  REQUIRE(csv.code == 0);
  CHECK(csv.out.find('\n') != std::string::npos);
  fs::remove(g);
}

}  // TEST_SUITE
