#include "hmmu/recency_filter.hpp"

#include <algorithm>

namespace hmmu {

RecencyFilter::RecencyFilter(std::uint64_t window, RecencyMode mode)
    : window_(window), mode_(mode) {
  HMMU_CHECK(window_ > 0, "recency window must be positive");
  if (mode_ == RecencyMode::Bloom) {
    bits_ = (window_ * kBitsPerKey + 63) / 64 * 64;
    for (auto& f : filters_) f.assign(bits_ / 64, 0);
  }
}

void RecencyFilter::insert(std::uint64_t key) {
  if (mode_ == RecencyMode::Exact) {
    recent_.push_back(key);
    ++recent_counts_[key];
    if (recent_.size() > window_) {
      auto it = recent_counts_.find(recent_.front());
      if (--it->second == 0) recent_counts_.erase(it);
      recent_.pop_front();
    }
    return;
  }

  if (active_inserts_ == window_) {
    active_ ^= 1u;
    std::fill(filters_[active_].begin(), filters_[active_].end(), 0);
    active_inserts_ = 0;
  }
  auto& f = filters_[active_];
  const std::uint64_t h1 = mix64(key);
  const std::uint64_t h2 = mix64(h1 ^ 0xA24BAED4963EE407ull) | 1u;
  for (unsigned i = 0; i < kHashes; ++i) {
    const std::uint64_t bit = (h1 + i * h2) % bits_;
    f[bit / 64] |= 1ull << (bit % 64);
  }
  ++active_inserts_;
}

bool RecencyFilter::bloom_test(const std::vector<std::uint64_t>& f, std::uint64_t key) const {
  const std::uint64_t h1 = mix64(key);
  const std::uint64_t h2 = mix64(h1 ^ 0xA24BAED4963EE407ull) | 1u;
  for (unsigned i = 0; i < kHashes; ++i) {
    const std::uint64_t bit = (h1 + i * h2) % bits_;
    if (!(f[bit / 64] >> (bit % 64) & 1u)) return false;
  }
  return true;
}

bool RecencyFilter::contains(std::uint64_t key) const {
  if (mode_ == RecencyMode::Exact) return recent_counts_.count(key) != 0;
  return bloom_test(filters_[0], key) || bloom_test(filters_[1], key);
}

}  // namespace hmmu
