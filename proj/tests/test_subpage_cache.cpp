#include "doctest.h"

#include <array>
#include <random>
#include <vector>

#include "hmmu/subpage_cache.hpp"

using namespace hmmu;

namespace {

Geometry page_geometry(std::uint64_t fast, std::uint64_t slow) {
  Geometry g;
  g.page_bytes = 4096;
  g.block_bytes = 128;
  g.blocks_per_page = 32;
  g.fast_pages = fast;
  g.slow_pages = slow;
  g.total_pages = fast + slow;
  return g;
}

// Binary-tree pLRU written out node by node: each node remembers which child
// was used most recently; the victim walk goes the other way.
struct TreeModel {
  std::array<int, 3> mru_child{0, 0, 0};  // root, left pair, right pair
  void touch(unsigned way) {
    mru_child[0] = way < 2 ? 0 : 1;
    if (way < 2) mru_child[1] = static_cast<int>(way);
    else mru_child[2] = static_cast<int>(way - 2);
  }
  unsigned victim() const {
    const int side = 1 - mru_child[0];
    const int leaf = 1 - mru_child[1 + side];
    return static_cast<unsigned>(side * 2 + leaf);
  }
};

std::vector<std::uint8_t> block_of(std::uint8_t v) { return std::vector<std::uint8_t>(128, v); }

}  // namespace

TEST_CASE("pLRU bit helpers agree with a node-by-node tree model") {
  std::mt19937 rng(3);
  std::uint8_t bits = 0;
  TreeModel model;
  // Align both: the all-zero tree names way 0 as victim in each.
  model.mru_child = {1, 1, 1};
  REQUIRE(plru_victim(bits) == model.victim());
  for (int i = 0; i < 5000; ++i) {
    const unsigned w = rng() % 4;
    bits = plru_touch(bits, w);
    model.touch(w);
    REQUIRE(plru_victim(bits) == model.victim());
    REQUIRE(plru_victim(bits) != w);
  }
}

TEST_CASE("pLRU replays the classic A B C D A E pattern") {
  std::uint8_t bits = 0;
  for (unsigned w : {0u, 1u, 2u, 3u, 0u}) bits = plru_touch(bits, w);
  // After touching 0 last, the left pair is MRU; the right pair's LRU is way 2.
  CHECK(plru_victim(bits) == 2);
}

TEST_CASE("insert, hit, and eviction within a set") {
  PageTable pt(page_geometry(4, 60));
  SubpageCache cache({128, 4, 32});
  // Block ids that all map to set 1: slow pages' blocks 1, 5, 9, ...
  const std::uint64_t base = 10 * 32;  // host page 10 (slow)
  std::vector<std::uint64_t> ids;
  for (int i = 0; i < 5; ++i) ids.push_back(base + 1 + 4 * i);
  for (int i = 0; i < 4; ++i) CHECK_FALSE(cache.insert(ids[i], block_of(i + 1), false, pt).has_value());
  CHECK(pt.entry(10).cached_block_count == 4);
  CHECK(cache.lookup(ids[0]).has_value());  // protect way 0
  auto ev = cache.insert(ids[4], block_of(9), false, pt);
  REQUIRE(ev.has_value());
  CHECK(ev->block_id == ids[2]);
  CHECK_FALSE(ev->dirty);
  CHECK(ev->data.empty());
  CHECK(pt.entry(10).cached_block_count == 4);
  CHECK(cache.valid_blocks() == 4);
}

TEST_CASE("dirty eviction returns the written data") {
  PageTable pt(page_geometry(4, 60));
  SubpageCache cache({128, 1, 32});
  const std::uint64_t first = 20 * 32;
  for (int i = 0; i < 4; ++i) cache.insert(first + i, block_of(i), false, pt);
  std::uint8_t patch[3] = {7, 8, 9};
  cache.write(first + 0, 10, patch);
  for (unsigned w : {1u, 2u, 3u}) cache.lookup(first + w);
  auto ev = cache.insert(first + 4, block_of(0), false, pt);
  REQUIRE(ev.has_value());
  CHECK(ev->block_id == first);
  CHECK(ev->dirty);
  REQUIRE(ev->data.size() == 128);
  CHECK(ev->data[10] == 7);
  CHECK(ev->data[12] == 9);
  CHECK(ev->data[13] == 0);
}

TEST_CASE("writing a block that is not resident is an internal error") {
  PageTable pt(page_geometry(4, 60));
  SubpageCache cache({128, 4, 32});
  std::uint8_t b = 1;
  CHECK_THROWS_AS(cache.write(999, 0, std::span(&b, 1)), InternalError);
}

TEST_CASE("blocks of a promoted page are recycled") {
  PageTable pt(page_geometry(4, 60));
  SubpageCache cache({128, 8, 32});
  const std::uint64_t page = 12;
  cache.insert(page * 32 + 3, block_of(5), true, pt);
  CHECK_FALSE(cache.recycle_if_promoted(page * 32 + 3, pt).has_value());

  SwapJob j;
  j.src_host = page;
  j.dst_host = 1;
  j.src_internal = pt.lookup_page(page);
  j.dst_internal = pt.lookup_page(1);
  j.state = SwapState::Complete;
  pt.apply_swap(j);

  auto r = cache.recycle_if_promoted(page * 32 + 3, pt);
  REQUIRE(r.has_value());
  CHECK(r->dirty);
  CHECK(r->data[0] == 5);
  CHECK_FALSE(cache.contains(page * 32 + 3));
  CHECK(pt.entry(page).cached_block_count == 0);
}

TEST_CASE("occupancy: per-page counters equal resident blocks under random traffic") {
  const std::uint64_t slow_first = 4, pages = 64;
  PageTable pt(page_geometry(slow_first, pages - slow_first));
  SubpageCache cache({128, 16, 32});
  std::mt19937_64 rng(5);
  // Twelve blocks per page keeps every page under the counter's ceiling.
  std::uniform_int_distribution<std::uint64_t> page(slow_first, slow_first + 9), block(0, 11);
  for (int i = 0; i < 20000; ++i) {
    const auto id = page(rng) * 32 + block(rng);
    if (!cache.lookup(id)) cache.insert(id, block_of(1), rng() % 2, pt);
  }
  std::vector<std::uint64_t> resident(pages, 0);
  for (std::uint64_t s = 0; s < 16; ++s)
    for (const auto& w : cache.set(s).ways)
      if (w.valid) ++resident[w.tag / 32];
  std::uint64_t total = 0;
  for (std::uint64_t p = 0; p < pages; ++p) {
    total += resident[p];
    CHECK(pt.entry(p).cached_block_count == resident[p]);
  }
  CHECK(total == cache.valid_blocks());
}
