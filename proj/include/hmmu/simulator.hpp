#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "hmmu/config.hpp"
#include "hmmu/memory_store.hpp"
#include "hmmu/meter.hpp"
#include "hmmu/migration_engine.hpp"
#include "hmmu/page_table.hpp"
#include "hmmu/policy.hpp"
#include "hmmu/subpage_cache.hpp"
#include "hmmu/trace.hpp"

namespace hmmu {

enum class MigrationAction : std::uint8_t { None, BlockCopy, PageSwapStarted, SwapRejected };

struct ServiceOutcome {
  Tier device = Tier::Fast;
  std::uint64_t latency_ns = 0;  // includes stall_ns
  std::uint64_t stall_ns = 0;
  bool cache_hit = false;
  bool in_flight = false;  // page was part of the active swap
  bool recycled = false;
  MigrationAction action = MigrationAction::None;
  std::optional<std::uint64_t> evicted_block;
};

/// The HMMU: remaps each request, serves it from the tier holding the
/// freshest copy, and lets the policy start block copies or page swaps on
/// the DMA engine. Single-threaded; instances share nothing.
class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);

  /// Serve one request. `read_out`, when non-empty, receives the bytes read
  /// (must be exactly size_bytes long).
  ServiceOutcome dispatch(const MemoryRequest& req, std::span<std::uint8_t> read_out = {});

  /// Throws when the trace does not fit the configured memory.
  void check_footprint(std::span<const TraceRecord> trace) const;

  /// Dispatch the whole trace in order, drain, and report.
  FinalReport run(std::span<const TraceRecord> trace);

  /// Let any in-flight swap finish (off the foreground clock).
  void drain();
  FinalReport finish();

  const SimConfig& config() const { return cfg_; }
  const Geometry& geometry() const { return geo_; }
  const PageTable& page_table() const { return pt_; }
  const SubpageCache& cache() const { return cache_; }
  const MigrationEngine& engine() const { return dma_; }
  const MemoryStore& store() const { return store_; }
  const Meter& meter() const { return meter_; }
  const Policy& policy() const { return policy_; }
  std::uint64_t now_ns() const { return now_; }
  std::uint64_t content_digest() const { return digest_; }

 private:
  void advance(std::uint64_t t);
  void search_candidate();
  std::uint64_t home_page(std::uint64_t host_page, std::uint64_t offset) const;
  Tier tier_of(std::uint64_t internal_page) const { return pt_.is_fast(internal_page) ? Tier::Fast : Tier::Slow; }
  void put_back(const EvictedBlock& ev, bool recycle);
  void try_start_swap(std::uint64_t host_page, std::uint64_t internal, ServiceOutcome& out);
  void copy_block_to_cache(std::uint64_t host_page, std::uint64_t block_in_page, std::uint64_t internal,
                           ServiceOutcome& out);
  void absorb(std::span<const std::uint8_t> bytes);

  SimConfig cfg_;
  Geometry geo_;
  PageTable pt_;
  SubpageCache cache_;
  MigrationEngine dma_;
  MemoryStore store_;
  Meter meter_;
  Policy policy_;
  std::uint64_t now_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ull;
  std::vector<std::uint8_t> scratch_;
};

/// Convenience: fresh simulator, run, report.
FinalReport simulate(const SimConfig& cfg, std::span<const TraceRecord> trace);

}  // namespace hmmu
