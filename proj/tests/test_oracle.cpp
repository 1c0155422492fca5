#include "doctest.h"

#include <map>

#include "hmmu/oracle.hpp"
#include "hmmu/simulator.hpp"
#include "support.hpp"

using namespace hmmu;
using hmmu::test::random_trace;
using hmmu::test::small_config;

namespace {

std::uint64_t space_for(const SimConfig& cfg) {
  return cfg.policy == PolicyKind::AllDRAM ? cfg.fast_capacity_bytes : Geometry::of(cfg).host_space_bytes();
}

}  // namespace

TEST_CASE("oracle and simulator agree exactly with an exact recency queue") {
  for (auto p : {PolicyKind::Static, PolicyKind::PageMove, PolicyKind::StatComb, PolicyKind::AdpComb,
                 PolicyKind::AllDRAM}) {
    CAPTURE(to_string(p));
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      auto cfg = small_config(p);
      cfg.recency = RecencyMode::Exact;
      cfg.adaptive.window_pages = 2;
      const auto trace = random_trace(seed * 31, 4000, space_for(cfg) / (seed % 2 ? 1 : 3));
      const auto sim = simulate(cfg, trace);
      const auto ora = oracle_run(cfg, trace);
      CHECK(sim == ora);
    }
  }
}

TEST_CASE("oracle reads match the simulator read by read") {
  auto cfg = small_config(PolicyKind::StatComb);
  cfg.recency = RecencyMode::Exact;
  const auto trace = random_trace(77, 3000, space_for(cfg) / 2);
  std::map<std::uint64_t, std::vector<std::uint8_t>> seen;
  oracle_run(cfg, trace, [&](std::uint64_t seq, std::span<const std::uint8_t> b) {
    seen[seq].assign(b.begin(), b.end());
  });
  Simulator sim(cfg);
  std::uint64_t reads = 0;
  for (std::uint64_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    std::vector<std::uint8_t> got(r.size_bytes);
    sim.dispatch({r.kind, r.host_addr, r.size_bytes, i}, got);
    if (r.kind == AccessKind::Write) continue;
    ++reads;
    REQUIRE(seen.count(i));
    REQUIRE(seen[i] == got);
  }
  CHECK(seen.size() == reads);
}

TEST_CASE("with the bloom filter the content digest still agrees") {
  auto cfg = small_config(PolicyKind::StatComb);
  cfg.bloom_window = 16;
  const auto trace = random_trace(5, 5000, space_for(cfg));
  const auto sim = simulate(cfg, trace);
  const auto ora = oracle_run(cfg, trace);
  CHECK(sim.content_digest == ora.content_digest);
  CHECK(sim.ledger.requests == ora.ledger.requests);
}

TEST_CASE("oracle rejects what the simulator rejects") {
  std::vector<TraceRecord> t = {{AccessKind::Read, 100 * 1024, 64}};
  CHECK_THROWS_AS(oracle_run(small_config(PolicyKind::AllDRAM), t), ConfigError);
}
