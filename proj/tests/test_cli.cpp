#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "../tools/cli.hpp"
#include "hmmu/trace.hpp"

using namespace hmmu;
using json = nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "hmmusim");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Result r;
  r.code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string tmp(const std::string& name) { return (std::filesystem::path(HMMU_TMP_DIR) / name).string(); }

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

const std::vector<std::string> kSmall = {"--fast-size", "1MiB", "--slow-size", "8MiB", "--cache-size", "128KiB",
                                         "--bloom-window", "64"};

std::vector<std::string> with_small(std::vector<std::string> a) {
  a.insert(a.end(), kSmall.begin(), kSmall.end());
  return a;
}

}  // namespace

TEST_CASE("metacost prints the reference figures") {
  auto r = run_cli({"metacost", "--space", "2GiB", "--page", "4KiB"});
  CHECK(r.code == 0);
  CHECK(r.out.find("3 bytes/entry") != std::string::npos);
  CHECK(r.out.find("1.5MiB total") != std::string::npos);
  r = run_cli({"metacost", "--sets", "65536"});
  CHECK(r.out.find("39 bits/set, 312KiB total") != std::string::npos);
  r = run_cli({"metacost", "--space", "4KiB", "--page", "4KiB"});
  CHECK(r.out.find("5 bits/entry") != std::string::npos);
  r = run_cli({"metacost", "--page", "3000"});
  CHECK(r.code != 0);
}

TEST_CASE("run on a trace file with AllDRAM normalization") {
  WorkloadSpec w;
  w.kind = WorkloadKind::Zipfian;
  w.footprint_bytes = 512 << 10;
  w.request_count = 3000;
  const auto trace_path = tmp("cli_run.trace");
  save_trace(trace_path, generate(w));
  const auto out = tmp("cli_run.json");
  auto r = run_cli(with_small({"run", "--trace", trace_path, "--policy", "alldram,pagemove", "--out", out}));
  REQUIRE(r.code == 0);
  const auto j = read_json(out);
  CHECK(j["schema_version"] == 1);
  REQUIRE(j["runs"].size() == 2);
  CHECK(j["runs"][0]["report"]["policy"] == "alldram");
  CHECK(j["runs"][1]["report"]["policy"] == "pagemove");
  CHECK(j["runs"][0]["report"]["normalized"]["speedup_vs_alldram"] == 1.0);
  CHECK(j["runs"][1]["report"]["normalized"]["speedup_vs_alldram"].get<double>() <= 1.0);
  CHECK(j["comparison"].size() == 2);
  CHECK_FALSE(std::filesystem::exists(out + ".tmp"));
}

TEST_CASE("generated sparse-wide comparison favours StatComb on slow writes") {
  auto r = run_cli(with_small({"run", "--gen", "sparse-wide", "--pages", "1024", "--requests", "20000",
                               "--policy", "statcomb,pagemove"}));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  const auto sc = j["comparison"][0]["slow_writes_total"].get<std::uint64_t>();
  const auto pm = j["comparison"][1]["slow_writes_total"].get<std::uint64_t>();
  CHECK(sc <= pm);
}

TEST_CASE("sweep over the promotion threshold") {
  const auto trace_path = tmp("cli_sweep.trace");
  REQUIRE(run_cli(with_small({"gen", "--gen", "mixed", "--pages", "512", "--requests", "5000", "--out",
                              trace_path})).code == 0);
  auto r = run_cli(with_small({"sweep", "--param", "promotion_threshold", "--values", "2,3,4,5,6", "--policy",
                               "statcomb", "--trace", trace_path}));
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["param"] == "promotion_threshold");
  REQUIRE(j["points"].size() == 5);
  CHECK(j["points"][0]["value"] == "2");
  for (const auto& p : j["points"]) {
    CHECK(p.contains("runtime_ns"));
    CHECK(p.contains("slow_writes_total"));
    CHECK(p.contains("block_relocations"));
    CHECK(p.contains("page_relocations"));
  }
}

TEST_CASE("csv output has a header and one row per run") {
  auto r = run_cli(with_small({"run", "--gen", "sequential", "--pages", "16", "--requests", "500", "--policy",
                               "static,pagemove", "--format", "csv"}));
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0].rfind("label,policy,requests,", 0) == 0);
  CHECK(lines[1].rfind("static,static,500,", 0) == 0);
}

TEST_CASE("an infeasible AllDRAM run fails without hiding the others") {
  auto r = run_cli(with_small({"run", "--gen", "zipfian", "--pages", "1024", "--requests", "1000", "--policy",
                               "alldram,pagemove"}));
  CHECK(r.code == 1);
  CHECK(r.err.find("alldram infeasible") != std::string::npos);
  const auto j = json::parse(r.out);
  CHECK(j["runs"][0]["status"] == "failed");
  CHECK(j["runs"][1]["status"] == "ok");
}

TEST_CASE("bad usage is rejected") {
  CHECK(run_cli({"run", "--no-such-flag"}).code != 0);
  CHECK(run_cli({}).code != 0);
  CHECK(run_cli({"run", "--gen", "sequential", "--policy", "fastest"}).code != 0);
  CHECK(run_cli({"run", "--policy", "static"}).code != 0);
  auto r = run_cli({"run", "--trace", tmp("missing.trace"), "--policy", "static"});
  CHECK(r.code != 0);
  CHECK(r.err.find("missing.trace") != std::string::npos);
}
