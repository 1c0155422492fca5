#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hmmu {

enum class AccessKind : std::uint8_t { Read, Write };
enum class Tier : std::uint8_t { Fast, Slow };

inline constexpr unsigned kCacheWays = 4;
inline constexpr unsigned kBitmapBits = 8;
inline constexpr unsigned kCachedCountMax = 15;

/// One host request as seen by the HMMU. Never crosses a block boundary.
struct MemoryRequest {
  AccessKind kind = AccessKind::Read;
  std::uint64_t host_addr = 0;
  std::uint32_t size_bytes = 0;
  std::uint64_t seq = 0;
};

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Byte stored at `addr` by the write with ordinal `seq`. Traces carry no
/// payload, so write data is synthesized from (seq, addr).
constexpr std::uint8_t payload_byte(std::uint64_t seq, std::uint64_t addr) {
  return static_cast<std::uint8_t>(mix64(seq * 0xD6E8FEB86659FD93ull ^ addr) >> 56) | 1u;
}

constexpr bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

constexpr unsigned log2_floor(std::uint64_t v) {
  unsigned r = 0;
  while (v >>= 1) ++r;
  return r;
}

constexpr unsigned log2_ceil(std::uint64_t v) {
  return v <= 1 ? 0 : log2_floor(v - 1) + 1;
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Broken internal contract (caller misuse or simulator bug).
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace hmmu

#define HMMU_CHECK(cond, msg)                                                 \
  do {                                                                        \
    if (!(cond))                                                              \
      throw ::hmmu::InternalError(std::string(__FILE__) + ":" +              \
                                  std::to_string(__LINE__) + ": " + (msg));   \
  } while (0)
