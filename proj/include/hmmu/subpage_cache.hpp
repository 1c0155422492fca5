#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hmmu/page_table.hpp"
#include "hmmu/types.hpp"

namespace hmmu {

struct CacheGeometry {
  std::uint64_t block_bytes = 128;
  std::uint64_t sets = 0;
  std::uint64_t blocks_per_page = 32;
  static constexpr unsigned ways = kCacheWays;
};

struct CacheWay {
  std::uint64_t tag = 0;  // host block id: host_page * blocks_per_page + block
  bool valid = false;
  bool dirty = false;
};

struct CacheSetMeta {
  std::array<CacheWay, kCacheWays> ways{};
  std::uint8_t plru = 0;  // 3-bit tree: bit0 root, bit1 left pair, bit2 right pair
};

// Tree bits point towards the pseudo-least-recently-used side.
constexpr std::uint8_t plru_touch(std::uint8_t bits, unsigned way) {
  if (way < 2) {
    bits = static_cast<std::uint8_t>(bits | 1u);
    bits = way == 0 ? static_cast<std::uint8_t>(bits | 2u) : static_cast<std::uint8_t>(bits & ~2u);
  } else {
    bits = static_cast<std::uint8_t>(bits & ~1u);
    bits = way == 2 ? static_cast<std::uint8_t>(bits | 4u) : static_cast<std::uint8_t>(bits & ~4u);
  }
  return bits;
}

constexpr unsigned plru_victim(std::uint8_t bits) {
  if (!(bits & 1u)) return (bits & 2u) ? 1 : 0;
  return (bits & 4u) ? 3 : 2;
}

/// A block removed from the cache. `data` is only filled for dirty blocks.
struct EvictedBlock {
  std::uint64_t block_id = 0;
  bool dirty = false;
  std::vector<std::uint8_t> data;
};

/// The cache zone of fast memory: a 4-way set-associative store of sub-page
/// blocks with pseudo-LRU replacement. Keeps the owning pages'
/// cached_block_count in the page table in step with residency.
class SubpageCache {
 public:
  explicit SubpageCache(const CacheGeometry& geo);

  const CacheGeometry& geometry() const { return geo_; }
  bool enabled() const { return geo_.sets != 0; }
  std::uint64_t set_index(std::uint64_t block_id) const { return block_id & (geo_.sets - 1); }

  /// On hit, protects the touched way in the pLRU tree.
  std::optional<unsigned> lookup(std::uint64_t block_id);
  bool contains(std::uint64_t block_id) const;

  /// Install a block that is not resident. Returns the displaced block, if any.
  std::optional<EvictedBlock> insert(std::uint64_t block_id, std::span<const std::uint8_t> data,
                                     bool dirty, PageTable& pt);

  void read(std::uint64_t block_id, std::uint64_t offset, std::span<std::uint8_t> out) const;
  void write(std::uint64_t block_id, std::uint64_t offset, std::span<const std::uint8_t> in);

  /// If the block's page now lives in fast memory, drop the block. The
  /// returned EvictedBlock carries the data the caller must merge when dirty.
  std::optional<EvictedBlock> recycle_if_promoted(std::uint64_t block_id, PageTable& pt);

  std::uint64_t valid_blocks() const;
  const CacheSetMeta& set(std::uint64_t index) const { return sets_.at(index); }
  void dump(std::ostream& os) const;

 private:
  std::optional<unsigned> find(std::uint64_t block_id) const;
  std::span<std::uint8_t> way_data(std::uint64_t set, unsigned way);
  std::span<const std::uint8_t> way_data(std::uint64_t set, unsigned way) const;
  EvictedBlock take(std::uint64_t set, unsigned way, PageTable& pt);

  CacheGeometry geo_;
  std::vector<CacheSetMeta> sets_;
  std::vector<std::uint8_t> data_;
};

}  // namespace hmmu
