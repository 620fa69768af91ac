// Integration tests that drive the installed CLI binary end to end.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mrng/mrng_c.h"

#ifndef MRNG_CLI_PATH
#error "MRNG_CLI_PATH must be defined"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string command = std::string(MRNG_CLI_PATH) + " " + args + " 2>cli_stderr.txt";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.output.append(buf.data(), got);
  }
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

size_t count_lines(const std::string& text) {
  size_t lines = 0;
  for (char c : text) {
    if (c == '\n') ++lines;
  }
  return lines;
}

}  // namespace

TEST_CASE("gen writes a deterministic dataset") {
  RunResult first = run_cli("gen --n 50 --d 3 --seed 7 -o cli_data.vecbin");
  REQUIRE(first.exit_code == 0);
  std::string bytes = read_file("cli_data.vecbin");

  RunResult second = run_cli("gen --n 50 --d 3 --seed 7 -o cli_data2.vecbin");
  REQUIRE(second.exit_code == 0);
  CHECK(read_file("cli_data2.vecbin") == bytes);
  std::remove("cli_data2.vecbin");

  auto report = nlohmann::json::parse(first.output);
  CHECK(report["n"] == 50);
  CHECK(report["seed"] == 7);
}

TEST_CASE("build is deterministic and reports degrees") {
  RunResult first = run_cli("build --gen n=200,d=10,seed=7 --exact -o cli_g.mrng");
  REQUIRE(first.exit_code == 0);
  auto report = nlohmann::json::parse(first.output);
  CHECK(report["n"] == 200);
  CHECK(report["degrees"]["mean"].get<double>() > 1.0);
  std::string bytes = read_file("cli_g.mrng");

  RunResult second = run_cli("build --gen n=200,d=10,seed=7 --exact -o cli_g2.mrng");
  REQUIRE(second.exit_code == 0);
  CHECK(read_file("cli_g2.mrng") == bytes);
  std::remove("cli_g2.mrng");
}

TEST_CASE("bounded build respects the bound") {
  RunResult run = run_cli("build --gen n=200,d=10,seed=7 --degree-bound 8 -o cli_g8.mrng");
  REQUIRE(run.exit_code == 0);

  mrng_graph* graph = nullptr;
  REQUIRE(mrng_graph_load("cli_g8.mrng", &graph) == MRNG_OK);
  for (uint32_t v = 0; v < mrng_graph_node_count(graph); ++v) {
    CHECK(mrng_graph_degree(graph, v) <= 8);
  }
  mrng_graph_free(graph);
  std::remove("cli_g8.mrng");
}

TEST_CASE("search answers one line per query and matches brute force at full budget") {
  REQUIRE(run_cli("gen --n 150 --d 4 --seed 3 -o cli_base.vecbin").exit_code == 0);
  REQUIRE(run_cli("gen --n 5 --d 4 --seed 77 -o cli_queries.vecbin").exit_code == 0);
  REQUIRE(run_cli("build cli_base.vecbin --exact -o cli_base.mrng").exit_code == 0);

  RunResult search = run_cli(
      "search cli_base.mrng --dataset cli_base.vecbin --query-file cli_queries.vecbin "
      "--budget 150 --k 1");
  REQUIRE(search.exit_code == 0);
  REQUIRE(count_lines(search.output) == 5);

  mrng_dataset* base = nullptr;
  mrng_dataset* queries = nullptr;
  REQUIRE(mrng_dataset_load("cli_base.vecbin", &base) == MRNG_OK);
  REQUIRE(mrng_dataset_load("cli_queries.vecbin", &queries) == MRNG_OK);

  std::istringstream lines(search.output);
  std::string line;
  uint32_t qi = 0;
  while (std::getline(lines, line)) {
    auto parsed = nlohmann::json::parse(line);
    uint32_t oracle_id;
    double oracle_dist;
    REQUIRE(mrng_brute_force_knn(base, mrng_dataset_point(queries, qi), 1, &oracle_id,
                                 &oracle_dist) == MRNG_OK);
    CHECK(parsed["candidates"][0]["id"].get<uint32_t>() == oracle_id);
    ++qi;
  }
  mrng_dataset_free(base);
  mrng_dataset_free(queries);
}

TEST_CASE("search with escape and trace") {
  REQUIRE(run_cli("build cli_base.vecbin --exact --conflicts -o cli_conf.mrng").exit_code == 0);
  RunResult run = run_cli(
      "search cli_conf.mrng --dataset cli_base.vecbin --query-file cli_queries.vecbin "
      "--budget 40 --k 1 --escape --conflict-file cli_conf.mrng.conflicts --trace");
  REQUIRE(run.exit_code == 0);
  CHECK(run.output.find("\"action\":\"expand\"") != std::string::npos);
  std::remove("cli_conf.mrng");
  std::remove("cli_conf.mrng.conflicts");
}

TEST_CASE("verify exits zero on a sound graph and one on a broken one") {
  RunResult good = run_cli("verify cli_base.mrng --dataset cli_base.vecbin --checks all");
  CHECK(good.exit_code == 0);
  auto report = nlohmann::json::parse(good.output);
  CHECK(report["passed"] == true);
  CHECK(report["definition"]["passed"] == true);

  // corrupt the graph: drop the last 8 bytes
  std::string bytes = read_file("cli_base.mrng");
  {
    std::ofstream out("cli_broken.mrng", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 8));
  }
  RunResult io = run_cli("verify cli_broken.mrng --dataset cli_base.vecbin");
  CHECK(io.exit_code == 3);
  std::remove("cli_broken.mrng");

  // self-build mode with a deliberately wrong dataset pairing
  RunResult mismatch = run_cli("verify cli_base.mrng --gen n=150,d=4,seed=4 --checks monotonic");
  CHECK(mismatch.exit_code == 2);
}

TEST_CASE("verify exits one when a selected check fails") {
  // a degree-1 truncation is a union of tiny cycles, nowhere near monotonic
  REQUIRE(run_cli("build cli_base.vecbin --degree-bound 1 -o cli_frag.mrng").exit_code == 0);
  RunResult failing =
      run_cli("verify cli_frag.mrng --dataset cli_base.vecbin --checks monotonic");
  CHECK(failing.exit_code == 1);
  auto report = nlohmann::json::parse(failing.output);
  CHECK(report["passed"] == false);
  CHECK(report["monotonic"]["passed"] == false);
  CHECK(report["monotonic"].contains("counterexample"));
  std::remove("cli_frag.mrng");
}

TEST_CASE("verify self-build mode") {
  RunResult run = run_cli("verify --gen n=80,d=3,seed=5 --checks definition,angles");
  CHECK(run.exit_code == 0);
  auto report = nlohmann::json::parse(run.output);
  CHECK(report["passed"] == true);
  CHECK(report.contains("definition"));
  CHECK(report.contains("angles"));
  CHECK_FALSE(report.contains("minimality"));
}

TEST_CASE("experiment degree CSV is rerun-stable") {
  RunResult first = run_cli("experiment degree --n 80 --d 2 --seed 5 -o cli_deg.csv");
  REQUIRE(first.exit_code == 0);
  std::string csv = read_file("cli_deg.csv");
  std::string hist = read_file("cli_deg_hist.csv");
  CHECK(csv.rfind("version,", 0) == 0);

  RunResult second = run_cli("experiment degree --n 80 --d 2 --seed 5 -o cli_deg.csv");
  REQUIRE(second.exit_code == 0);
  CHECK(read_file("cli_deg.csv") == csv);
  CHECK(read_file("cli_deg_hist.csv") == hist);
  std::remove("cli_deg.csv");
  std::remove("cli_deg_hist.csv");
}

TEST_CASE("experiment cap produces a usage error without --force") {
  RunResult capped = run_cli("experiment conflicts --n 4000 --d 2 --seed 1");
  CHECK(capped.exit_code == 2);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("bogus-subcommand").exit_code == 2);
  CHECK(run_cli("gen --n 10").exit_code == 2);  // missing required flags
  CHECK(run_cli("search").exit_code == 2);      // missing graph argument
  CHECK(run_cli("build --gen n=10 --exact -o x.mrng").exit_code == 2);
}

TEST_CASE("io errors exit with code 3") {
  CHECK(run_cli("build does_not_exist.vecbin --exact -o x.mrng").exit_code == 3);
  std::remove("cli_base.vecbin");
  std::remove("cli_queries.vecbin");
  std::remove("cli_base.mrng");
  std::remove("cli_data.vecbin");
}
