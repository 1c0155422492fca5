#include "doctest.h"

#include <vector>

#include "hmmu/migration_engine.hpp"

using namespace hmmu;

namespace {

void fill(MemoryStore& s, std::uint64_t page, std::uint8_t v) {
  std::vector<std::uint8_t> buf(4096, v);
  s.write(page, 0, buf);
}

std::uint8_t byte_at(const MemoryStore& s, std::uint64_t page, std::uint64_t off) {
  std::uint8_t b = 0;
  s.read(page, off, std::span(&b, 1));
  return b;
}

}  // namespace

TEST_CASE("a 4KiB swap at 8 B/ns takes 1024 ns") {
  MigrationEngine e(4096, 128, 8.0);
  CHECK(e.swap_duration_ns() == 1024);
  e.start_swap(5, 500, 2, 2, 100);
  CHECK(e.completion_ns() == 1124);
  CHECK(e.progress_at(100) == 0);
  CHECK(e.progress_at(132) == 128);
  CHECK(e.progress_at(131) == 124);
  CHECK(e.progress_at(5000) == 4096);
  CHECK(e.time_for_progress(128) == 132);
  CHECK(e.time_for_progress(129) == 133);
}

TEST_CASE("only one swap at a time") {
  MigrationEngine e(4096, 128, 8.0);
  e.start_swap(5, 500, 2, 2, 0);
  CHECK(e.busy());
  CHECK_THROWS_AS(e.start_swap(6, 600, 3, 3, 10), InternalError);
}

TEST_CASE("chunks exchange as they complete and the job finishes on time") {
  MemoryStore s(4096);
  fill(s, 500, 0xAA);
  fill(s, 2, 0x55);
  MigrationEngine e(4096, 128, 8.0);
  e.start_swap(5, 500, 2, 2, 0);

  CHECK_FALSE(e.advance_to(40, s).has_value());  // 160 bytes in: one chunk landed
  CHECK(e.active()->state == SwapState::Copying);
  CHECK(byte_at(s, 2, 0) == 0xAA);
  CHECK(byte_at(s, 500, 127) == 0x55);
  CHECK(byte_at(s, 2, 128) == 0x55);

  CHECK_FALSE(e.advance_to(1023, s).has_value());
  auto done = e.advance_to(1024, s);
  REQUIRE(done.has_value());
  CHECK(done->state == SwapState::Complete);
  CHECK_FALSE(e.busy());
  CHECK(byte_at(s, 2, 4095) == 0xAA);
  CHECK(byte_at(s, 500, 4095) == 0x55);
  CHECK(e.swaps_completed() == 1);
  CHECK(e.migrated_bytes() == 8192);
}

TEST_CASE("routing a request to a page in flight") {
  MemoryStore s(4096);
  MigrationEngine e(4096, 128, 8.0);
  e.start_swap(5, 500, 2, 2, 0);
  e.advance_to(40, s);  // chunk 0 moved, chunk 1 half way

  // Already moved: both kinds go to the new home.
  CHECK(e.route_conflicting(5, 10, AccessKind::Read, 40).internal_page == 2);
  CHECK(e.route_conflicting(2, 10, AccessKind::Write, 40).internal_page == 500);
  // Not yet moved reads stay put.
  auto r = e.route_conflicting(5, 200, AccessKind::Read, 40);
  CHECK(r.internal_page == 500);
  CHECK(r.stall_ns == 0);
  // Write into the chunk on the wire waits for it (256 bytes at t=64).
  auto w = e.route_conflicting(5, 200, AccessKind::Write, 40);
  CHECK(w.internal_page == 2);
  CHECK(w.stall_ns == 24);
  // Write to an untouched chunk goes to the old location.
  auto w2 = e.route_conflicting(5, 1000, AccessKind::Write, 40);
  CHECK(w2.internal_page == 500);
  CHECK(w2.stall_ns == 0);

  CHECK(e.location(5, 0) == 2);
  CHECK(e.location(5, 200) == 500);
  CHECK_FALSE(e.involves(7));
}

TEST_CASE("block copies are counted in migrated bytes") {
  MigrationEngine e(4096, 128, 8.0);
  e.record_block_copy({77, BlockCopyDirection::SlowToCache, 128});
  e.record_block_copy({78, BlockCopyDirection::CacheToSlow, 128});
  CHECK(e.block_copies() == 2);
  CHECK(e.migrated_bytes() == 256);
}

TEST_CASE("odd bandwidth still lands every chunk") {
  MemoryStore s(4096);
  MigrationEngine e(4096, 128, 3.0);
  e.start_swap(1, 100, 0, 0, 7);
  const auto end = e.completion_ns();
  CHECK(e.progress_at(end) == 4096);
  CHECK(e.progress_at(end - 1) < 4096);
  for (std::uint64_t t = 7; t < end; t += 13) CHECK_FALSE(e.advance_to(t, s).has_value());
  CHECK(e.advance_to(end, s).has_value());
}

TEST_CASE("many small advances end where one big advance does") {
  MemoryStore a(4096), b(4096);
  for (std::uint64_t off = 0; off < 4096; off += 64) {
    std::uint8_t v = static_cast<std::uint8_t>(off / 64 + 1);
    a.write(9, off, std::span(&v, 1));
    b.write(9, off, std::span(&v, 1));
  }
  MigrationEngine step(4096, 128, 8.0), jump(4096, 128, 8.0);
  step.start_swap(9, 9, 0, 0, 5);
  jump.start_swap(9, 9, 0, 0, 5);
  CHECK_FALSE(step.advance_to(5, a).has_value());
  CHECK(step.progress_at(5) == 0);
  std::optional<SwapJob> s;
  for (std::uint64_t t = 5; !s; t += 7) s = step.advance_to(t, a);
  auto j = jump.advance_to(5000, b);
  REQUIRE(j.has_value());
  CHECK(s->progress_bytes == 4096);
  CHECK(j->progress_bytes == 4096);
  for (std::uint64_t off = 0; off < 4096; ++off) {
    std::uint8_t x = 0, y = 0;
    a.read(0, off, std::span(&x, 1));
    b.read(0, off, std::span(&y, 1));
    REQUIRE(x == y);
  }
}
