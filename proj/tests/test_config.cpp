#include "doctest.h"

#include <sstream>

#include "hmmu/config.hpp"

using namespace hmmu;

TEST_CASE("parse_size understands binary suffixes") {
  CHECK(parse_size("128") == 128);
  CHECK(parse_size("4KiB") == 4096);
  CHECK(parse_size("16 MiB") == 16ull << 20);
  CHECK(parse_size("2GiB") == 2ull << 30);
  CHECK(parse_size("1gib") == 1ull << 30);
  CHECK_THROWS_AS(parse_size("12XB"), ConfigError);
  CHECK_THROWS_AS(parse_size("MiB"), ConfigError);
}

TEST_CASE("defaults describe 128MiB DRAM + 1GiB NVM with the DDR4/3D-XPoint table") {
  SimConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.fast_read_ns == 50);
  CHECK(c.slow_write_ns == 300);
  CHECK(c.fast_read_nj == 4.2);
  CHECK(c.slow_write_nj == 8.7);
  CHECK(c.promotion_threshold == 4);
  CHECK(c.bloom_window == 2048);
}

TEST_CASE("cache zone only counts for combined policies") {
  SimConfig c;
  c.policy = PolicyKind::PageMove;
  auto g = Geometry::of(c);
  CHECK(g.fast_pages == 32768);
  CHECK(g.cache_sets == 0);
  c.policy = PolicyKind::StatComb;
  g = Geometry::of(c);
  CHECK(g.fast_pages == 28672);
  CHECK(g.cache_sets == 32768);
  CHECK(g.slow_pages == 262144);
  CHECK(g.blocks_per_page == 32);
}

TEST_CASE("validation rejects broken geometry") {
  SimConfig c;
  c.page_size_bytes = 3000;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = SimConfig{};
  c.policy = PolicyKind::StatComb;
  c.cache_zone_bytes = c.fast_capacity_bytes;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = SimConfig{};
  c.policy = PolicyKind::StatComb;
  c.cache_zone_bytes = 3 * 512;  // 3 sets
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = SimConfig{};
  c.promotion_threshold = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.promotion_threshold = 16;  // beyond the 4-bit counter
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("config file") {
  std::istringstream in(R"(
# hybrid memory
fast_capacity_bytes = 64MiB
slow_capacity_bytes = 512MiB   # trailing comment
policy = statcomb
promotion_threshold = 3
dma_bandwidth_bytes_per_ns = 16
recency = exact
)");
  auto c = load_config(in);
  CHECK(c.fast_capacity_bytes == 64ull << 20);
  CHECK(c.slow_capacity_bytes == 512ull << 20);
  CHECK(c.policy == PolicyKind::StatComb);
  CHECK(c.promotion_threshold == 3);
  CHECK(c.dma_bandwidth_bytes_per_ns == 16.0);
  CHECK(c.recency == RecencyMode::Exact);

  std::istringstream bad("fast_capacity_bytes 64MiB\n");
  CHECK_THROWS_WITH_AS(load_config(bad), doctest::Contains("line 1"), ConfigError);
  std::istringstream unknown("frobnicate = 1\n");
  CHECK_THROWS_AS(load_config(unknown), ConfigError);
}

TEST_CASE("policy names") {
  CHECK(parse_policy("AllDRAM") == PolicyKind::AllDRAM);
  auto l = parse_policy_list("alldram, pagemove");
  REQUIRE(l.size() == 2);
  CHECK(l[1] == PolicyKind::PageMove);
  CHECK_THROWS_AS(parse_policy("lru"), ConfigError);
}
