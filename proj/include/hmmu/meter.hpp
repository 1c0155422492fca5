#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hmmu/config.hpp"
#include "hmmu/types.hpp"

namespace hmmu {

enum class Phase : std::uint8_t { Foreground, Background };

struct Access {
  Tier tier = Tier::Fast;
  AccessKind kind = AccessKind::Read;
  Phase phase = Phase::Foreground;
  std::uint64_t bytes = 0;
};

/// Raw counters of one run. Access counts are in block-sized units.
struct MeterLedger {
  std::uint64_t requests = 0;
  std::uint64_t fast_reads = 0, fast_writes = 0, slow_reads = 0, slow_writes = 0;
  std::uint64_t mig_fast_reads = 0, mig_fast_writes = 0, mig_slow_reads = 0, mig_slow_writes = 0;
  std::uint64_t total_foreground_ns = 0;

  std::uint64_t page_swaps = 0;
  std::uint64_t swap_rejections = 0;
  std::uint64_t block_copies = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t recycles = 0;
  std::uint64_t migrated_bytes = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t conflict_requests = 0;
  std::uint64_t write_stalls = 0;
  std::uint64_t stall_ns = 0;

  bool operator==(const MeterLedger&) const = default;
};

struct EnergyBreakdown {
  double fast_background = 0, fast_read = 0, fast_write = 0, slow_read = 0, slow_write = 0;
  double total() const { return fast_background + fast_read + fast_write + slow_read + slow_write; }
  bool operator==(const EnergyBreakdown&) const = default;
};

struct FinalReport {
  static constexpr int kSchemaVersion = 1;

  std::string policy;
  MeterLedger ledger;
  std::uint64_t elapsed_ns = 0;
  EnergyBreakdown energy_nj;

  std::uint64_t slow_writes_total = 0;
  double fast_hit_fraction = 0;
  unsigned final_threshold = 0;
  std::uint64_t search_failures = 0;
  std::uint64_t content_digest = 0;

  std::optional<double> speedup_vs_alldram;
  std::optional<double> energy_vs_alldram;

  bool operator==(const FinalReport&) const = default;
  /// Equality of every measured quantity, ignoring the policy label.
  bool same_measurements(const FinalReport& o) const;
};

class Meter {
 public:
  explicit Meter(const SimConfig& cfg);

  /// Count the access; returns the foreground latency charged (0 for background).
  std::uint64_t charge(const Access& a);
  void add_stall(std::uint64_t ns);
  void add_foreground_time(std::uint64_t ns) { ledger_.total_foreground_ns += ns; }

  MeterLedger& ledger() { return ledger_; }
  const MeterLedger& ledger() const { return ledger_; }

 private:
  std::uint64_t block_bytes_;
  std::uint64_t latency_[2][2];  // [tier][kind]
  MeterLedger ledger_;
};

/// Background energy, in nJ, of `fast_bytes` of DRAM held for `elapsed_ns`.
double background_energy_nj(double mw_per_gb, std::uint64_t fast_bytes, std::uint64_t elapsed_ns);

/// Assemble the report; elapsed time is the foreground-latency total.
FinalReport finalize(const MeterLedger& ledger, const SimConfig& cfg, unsigned final_threshold = 0,
                     std::uint64_t search_failures = 0, std::uint64_t content_digest = 0);

/// Fill the AllDRAM-relative fields.
void normalize_to(FinalReport& r, const FinalReport& alldram);

struct MetadataGeometry {
  std::uint64_t space_bytes = 2ull << 30;
  std::uint64_t page_bytes = 4096;
  std::uint64_t block_bytes = 128;
  std::uint64_t sets = 1ull << 16;
  unsigned ways = kCacheWays;
  unsigned stat_bits = 5;       // per-entry statistics in the hardware estimate
  unsigned hw_tag_bits = 8;     // per-way tag width in the hardware estimate
};

struct MetadataCostReport {
  std::uint64_t page_entries = 0;
  unsigned bits_per_page_entry = 0;
  unsigned bytes_per_page_entry = 0;
  std::uint64_t total_page_table_bytes = 0;
  unsigned bits_per_cache_set = 0;
  std::uint64_t total_cache_meta_bytes = 0;

  // Functional variant: counter + bitmap per entry, full tags + valid bits per set.
  unsigned functional_bits_per_page_entry = 0;
  unsigned functional_bytes_per_page_entry = 0;
  std::uint64_t functional_page_table_bytes = 0;
  unsigned functional_bits_per_cache_set = 0;
  std::uint64_t functional_cache_meta_bytes = 0;
};

/// Throws ConfigError for a non-power-of-two page size or an empty space.
MetadataCostReport metadata_cost(const MetadataGeometry& g);

}  // namespace hmmu
