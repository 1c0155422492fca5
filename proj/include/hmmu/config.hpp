#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hmmu/types.hpp"

namespace hmmu {

enum class PolicyKind : std::uint8_t { Static, PageMove, StatComb, AdpComb, AllDRAM };
enum class RecencyMode : std::uint8_t { Bloom, Exact };

std::string_view to_string(PolicyKind p);
PolicyKind parse_policy(std::string_view name);
std::vector<PolicyKind> parse_policy_list(std::string_view csv);

struct PolicyTraits {
  bool migrates = false;
  bool uses_cache = false;
  bool adaptive = false;
};

constexpr PolicyTraits traits(PolicyKind p) {
  switch (p) {
    case PolicyKind::PageMove: return {true, false, false};
    case PolicyKind::StatComb: return {true, true, false};
    case PolicyKind::AdpComb: return {true, true, true};
    default: return {};
  }
}

struct AdaptiveParams {
  unsigned min_threshold = 1;
  unsigned max_threshold = 8;
  // Promotions per evaluation window; 0 disables adaptation.
  std::uint64_t window_pages = 64;
  double alpha = 0.25;
  double hi_water = 0.75;
  double lo_water = 0.25;
};

struct SimConfig {
  std::uint64_t fast_capacity_bytes = 128ull << 20;
  std::uint64_t slow_capacity_bytes = 1ull << 30;
  std::uint64_t page_size_bytes = 4096;
  std::uint64_t block_size_bytes = 128;
  // Only honored by the combined policies; the others page-manage all of fast memory.
  std::uint64_t cache_zone_bytes = 16ull << 20;

  std::uint64_t fast_read_ns = 50;
  std::uint64_t fast_write_ns = 50;
  std::uint64_t slow_read_ns = 100;
  std::uint64_t slow_write_ns = 300;

  double fast_read_nj = 4.2;
  double fast_write_nj = 3.5;
  double slow_read_nj = 1.28;
  double slow_write_nj = 8.7;
  double fast_background_mw_per_gb = 30.0;

  double dma_bandwidth_bytes_per_ns = 8.0;
  unsigned promotion_threshold = 4;
  std::uint64_t bloom_window = 2048;
  PolicyKind policy = PolicyKind::PageMove;
  std::uint64_t rng_seed = 1;

  AdaptiveParams adaptive;
  RecencyMode recency = RecencyMode::Bloom;

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  /// Assign a field by its config-file key. Byte sizes accept KiB/MiB/GiB.
  void set(std::string_view key, std::string_view value);

  std::uint64_t effective_cache_zone_bytes() const {
    return traits(policy).uses_cache ? cache_zone_bytes : 0;
  }

  static const std::vector<std::string>& keys();
};

/// Sizes derived from a validated config.
struct Geometry {
  std::uint64_t page_bytes = 0;
  std::uint64_t block_bytes = 0;
  std::uint64_t blocks_per_page = 0;
  std::uint64_t fast_pages = 0;  // page-managed fast pages, excludes the cache zone
  std::uint64_t slow_pages = 0;
  std::uint64_t total_pages = 0;
  std::uint64_t cache_sets = 0;

  std::uint64_t host_space_bytes() const { return total_pages * page_bytes; }

  static Geometry of(const SimConfig& cfg);
};

std::uint64_t parse_size(std::string_view text);
std::string format_size(std::uint64_t bytes);

/// `key = value` lines; `#` starts a comment.
SimConfig load_config(std::istream& in, SimConfig base = {});
SimConfig load_config_file(const std::filesystem::path& path, SimConfig base = {});

}  // namespace hmmu
