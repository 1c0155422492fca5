#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "hmmu/config.hpp"
#include "hmmu/recency_filter.hpp"
#include "hmmu/swap_job.hpp"

namespace hmmu {

struct PageTableEntry {
  std::uint64_t internal_page = 0;
  std::uint8_t cached_block_count = 0;  // saturates at 15
  std::uint8_t access_bitmap = 0;

  bool operator==(const PageTableEntry&) const = default;
};

struct VictimSearchState {
  std::uint64_t counter = 0;
  std::optional<std::uint64_t> candidate;  // internal fast page
  bool candidate_ready = false;
};

/// Host-to-internal page remapping plus the counter-driven search for the
/// next fast page to give up in a swap.
///
/// Internal pages [0, fast_pages) are fast; the rest are slow. The mapping is
/// kept as a bijection together with its inverse.
class PageTable {
 public:
  explicit PageTable(const Geometry& geo, std::uint64_t bloom_window = 2048,
                     RecencyMode mode = RecencyMode::Bloom);

  /// Replace the mapping with a seeded uniformly random bijection.
  void randomize(std::uint64_t seed);
  /// Install an explicit host->internal mapping; must be a permutation.
  void assign(std::span<const std::uint64_t> host_to_internal);

  std::uint64_t lookup(std::uint64_t host_addr) const;
  std::uint64_t lookup_page(std::uint64_t host_page) const;
  std::uint64_t host_of(std::uint64_t internal_page) const;
  bool is_fast(std::uint64_t internal_page) const { return internal_page < geo_.fast_pages; }
  bool host_is_fast(std::uint64_t host_page) const { return is_fast(lookup_page(host_page)); }

  const PageTableEntry& entry(std::uint64_t host_page) const;
  std::uint64_t pages() const { return entries_.size(); }
  const Geometry& geometry() const { return geo_; }

  /// Note an access: recency filter insert and access-bitmap bit.
  void record_access(std::uint64_t host_page, std::uint64_t block_in_page);
  bool recently_accessed(std::uint64_t host_page) const { return recency_.contains(host_page); }
  void reset_bitmap(std::uint64_t host_page);
  unsigned bitmap_bit(std::uint64_t block_in_page) const;

  void increment_cached(std::uint64_t host_page);
  void decrement_cached(std::uint64_t host_page);

  /// Table slot probed for a given counter value.
  static std::uint64_t probe_index(std::uint64_t counter, std::uint64_t total_pages) {
    return mix64(counter) % total_pages;
  }

  /// Advance the counter until it points at a fast page outside the recency
  /// filter and not in `excluded`. Gives up after 16 x fast_pages probes.
  std::optional<std::uint64_t> search_free_fast_page(std::span<const std::uint64_t> excluded = {});
  const VictimSearchState& search_state() const { return search_; }
  bool candidate_ready() const { return search_.candidate_ready; }
  /// Hand the ready candidate to a swap; a new search is needed afterwards.
  std::uint64_t take_candidate();
  std::uint64_t search_failures() const { return search_failures_; }

  /// Exchange the mappings of a completed swap's two pages.
  void apply_swap(const SwapJob& job);

  bool is_bijection() const;
  void dump(std::ostream& os) const;

 private:
  Geometry geo_;
  std::vector<PageTableEntry> entries_;
  std::vector<std::uint64_t> inverse_;
  RecencyFilter recency_;
  VictimSearchState search_;
  std::uint64_t search_failures_ = 0;
};

}  // namespace hmmu
