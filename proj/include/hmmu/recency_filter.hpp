#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "hmmu/config.hpp"

namespace hmmu {

/// Approximate "was this key among the last `window` insertions" test.
///
/// Two bloom filters alternate: inserts go to the active one, and once it has
/// taken `window` inserts the older filter is cleared and becomes active.
/// Queries check both, so every key inserted within the last `window`
/// insertions is reported present. Exact mode swaps the filters for a FIFO of
/// the last `window` keys; it exists so differential tests can remove the one
/// inexact structure from the pipeline.
class RecencyFilter {
 public:
  static constexpr unsigned kBitsPerKey = 10;
  static constexpr unsigned kHashes = 7;

  RecencyFilter(std::uint64_t window, RecencyMode mode = RecencyMode::Bloom);

  void insert(std::uint64_t key);
  bool contains(std::uint64_t key) const;

  std::uint64_t window() const { return window_; }
  RecencyMode mode() const { return mode_; }
  std::uint64_t bits_per_filter() const { return bits_; }

 private:
  bool bloom_test(const std::vector<std::uint64_t>& f, std::uint64_t key) const;

  std::uint64_t window_;
  RecencyMode mode_;

  std::uint64_t bits_ = 0;
  std::vector<std::uint64_t> filters_[2];
  unsigned active_ = 0;
  std::uint64_t active_inserts_ = 0;

  std::deque<std::uint64_t> recent_;
  std::unordered_map<std::uint64_t, std::uint32_t> recent_counts_;
};

}  // namespace hmmu
