#pragma once

#include <cstdint>
#include <optional>

#include "hmmu/memory_store.hpp"
#include "hmmu/swap_job.hpp"
#include "hmmu/types.hpp"

namespace hmmu {

enum class BlockCopyDirection : std::uint8_t { SlowToCache, CacheToSlow, CacheToFast };

struct BlockCopyJob {
  std::uint64_t block_id = 0;
  BlockCopyDirection direction = BlockCopyDirection::SlowToCache;
  std::uint64_t bytes = 0;
};

/// Where a request to a page under migration must go.
struct SwapRoute {
  std::uint64_t internal_page = 0;
  std::uint64_t stall_ns = 0;  // nonzero only for a write into the chunk being copied
};

/// Single-channel DMA engine. A page swap moves both pages through a bounce
/// buffer in chunk_bytes steps at `bandwidth` bytes/ns total, so each
/// direction advances at bandwidth/2. Chunk contents are exchanged in the
/// backing store when the chunk completes.
class MigrationEngine {
 public:
  MigrationEngine(std::uint64_t page_bytes, std::uint64_t chunk_bytes, double bandwidth_bytes_per_ns);

  bool busy() const { return job_.has_value(); }
  const std::optional<SwapJob>& active() const { return job_; }

  /// Throws InternalError when a swap is already active.
  const SwapJob& start_swap(std::uint64_t src_host, std::uint64_t src_internal,
                            std::uint64_t dst_host, std::uint64_t dst_internal, std::uint64_t now_ns);

  /// Move the active swap forward to `now_ns`; returns the job if it finished.
  std::optional<SwapJob> advance_to(std::uint64_t now_ns, MemoryStore& store);

  bool involves(std::uint64_t host_page) const;
  /// Routing for a foreground request to a page in flight.
  SwapRoute route_conflicting(std::uint64_t host_page, std::uint64_t offset, AccessKind kind,
                              std::uint64_t now_ns) const;
  /// Current home of a byte of a page in flight, for background transfers.
  std::uint64_t location(std::uint64_t host_page, std::uint64_t offset) const;

  std::uint64_t progress_at(std::uint64_t now_ns) const;
  /// Earliest time at which progress reaches `bytes`.
  std::uint64_t time_for_progress(std::uint64_t bytes) const;
  std::uint64_t completion_ns() const;
  std::uint64_t swap_duration_ns() const;

  void record_block_copy(const BlockCopyJob& job);

  std::uint64_t swaps_started() const { return swaps_started_; }
  std::uint64_t swaps_completed() const { return swaps_completed_; }
  std::uint64_t block_copies() const { return block_copies_; }
  std::uint64_t migrated_bytes() const { return migrated_bytes_; }
  std::uint64_t chunk_bytes() const { return chunk_bytes_; }

 private:
  std::uint64_t progress_after(std::uint64_t elapsed_ns) const;

  std::uint64_t page_bytes_;
  std::uint64_t chunk_bytes_;
  double bandwidth_;
  std::optional<SwapJob> job_;
  std::uint64_t chunks_moved_ = 0;
  std::uint64_t clock_ = 0;

  std::uint64_t swaps_started_ = 0;
  std::uint64_t swaps_completed_ = 0;
  std::uint64_t block_copies_ = 0;
  std::uint64_t migrated_bytes_ = 0;
};

}  // namespace hmmu
