#pragma once

#include <random>
#include <unordered_map>
#include <vector>

#include "hmmu/config.hpp"
#include "hmmu/trace.hpp"

namespace hmmu::test {

// 16 fast pages, 64 slow pages, 16-set cache zone for the combined policies.
inline SimConfig small_config(PolicyKind p = PolicyKind::PageMove) {
  SimConfig c;
  c.fast_capacity_bytes = 64 << 10;
  c.slow_capacity_bytes = 256 << 10;
  c.cache_zone_bytes = 8 << 10;
  c.bloom_window = 4;
  c.policy = p;
  return c;
}

inline std::vector<TraceRecord> random_trace(std::uint64_t seed, std::uint64_t n, std::uint64_t space,
                                             double write_fraction = 0.4, std::uint64_t block = 128) {
  std::mt19937_64 rng(seed);
  std::vector<TraceRecord> out;
  out.reserve(n);
  std::uniform_int_distribution<std::uint64_t> addr(0, space - 1);
  std::uniform_real_distribution<double> u(0, 1);
  std::uniform_int_distribution<int> sz(0, 3);
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::uint32_t size = 8u << sz(rng);  // 8..64
    std::uint64_t a = addr(rng) / size * size;
    if (a % block + size > block) a -= a % block;
    out.push_back({u(rng) < write_fraction ? AccessKind::Write : AccessKind::Read, a, size});
  }
  return out;
}

/// Flat host-addressed model of memory contents.
class ShadowMemory {
 public:
  void apply_write(std::uint64_t seq, const TraceRecord& r) {
    for (std::uint32_t i = 0; i < r.size_bytes; ++i) bytes_[r.host_addr + i] = payload_byte(seq, r.host_addr + i);
  }
  std::uint8_t at(std::uint64_t addr) const {
    auto it = bytes_.find(addr);
    return it == bytes_.end() ? 0 : it->second;
  }
  bool matches(const TraceRecord& r, const std::vector<std::uint8_t>& got) const {
    for (std::uint32_t i = 0; i < r.size_bytes; ++i)
      if (got[i] != at(r.host_addr + i)) return false;
    return true;
  }

 private:
  std::unordered_map<std::uint64_t, std::uint8_t> bytes_;
};

}  // namespace hmmu::test
