#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hmmu/types.hpp"

namespace hmmu {

struct TraceRecord {
  AccessKind kind = AccessKind::Read;
  std::uint64_t host_addr = 0;
  std::uint32_t size_bytes = 64;

  bool operator==(const TraceRecord&) const = default;
};

inline constexpr std::uint32_t kDefaultRequestBytes = 64;

/// Split a request into pieces that stay within one block.
std::vector<TraceRecord> split_at_blocks(const TraceRecord& r, std::uint64_t block_bytes);

/// Lines of `R|W <hex-addr> [<size>]`; `#` comments and blank lines skipped.
/// Throws TraceError naming the offending line.
std::vector<TraceRecord> parse_trace(std::istream& in, std::uint64_t block_bytes = 128);
/// Reads plain or gzip-compressed trace files.
std::vector<TraceRecord> load_trace(const std::filesystem::path& path, std::uint64_t block_bytes = 128);

void write_trace(std::ostream& out, std::span<const TraceRecord> records);
void save_trace(const std::filesystem::path& path, std::span<const TraceRecord> records);

/// One past the highest byte touched.
std::uint64_t footprint_end(std::span<const TraceRecord> records);

enum class WorkloadKind : std::uint8_t { Sequential, Strided, Zipfian, SparseWide, StreamingStore, Mixed };

WorkloadKind parse_workload_kind(std::string_view name);
std::string_view to_string(WorkloadKind k);

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Sequential;
  std::uint64_t footprint_bytes = 1ull << 20;
  std::uint64_t request_count = 10000;
  // Unset: 0.8 for streaming-store, 0.3 otherwise.
  std::optional<double> write_fraction;
  std::uint64_t seed = 1;
  std::uint64_t base_addr = 0;
  std::uint32_t request_bytes = kDefaultRequestBytes;
  std::uint64_t stride_bytes = 4096;
  double zipf_s = 0.99;
  std::uint64_t page_bytes = 4096;
  std::uint64_t block_bytes = 128;
};

/// Deterministic for a fixed spec. Throws ConfigError when the footprint does
/// not fit in `address_space_bytes`.
std::vector<TraceRecord> generate(const WorkloadSpec& spec,
                                  std::uint64_t address_space_bytes = ~0ull);

}  // namespace hmmu
