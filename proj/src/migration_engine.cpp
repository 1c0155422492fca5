#include "hmmu/migration_engine.hpp"

#include <cmath>

namespace hmmu {

MigrationEngine::MigrationEngine(std::uint64_t page_bytes, std::uint64_t chunk_bytes,
                                 double bandwidth_bytes_per_ns)
    : page_bytes_(page_bytes), chunk_bytes_(chunk_bytes), bandwidth_(bandwidth_bytes_per_ns) {
  HMMU_CHECK(chunk_bytes_ > 0 && page_bytes_ % chunk_bytes_ == 0, "chunk must divide the page");
  HMMU_CHECK(bandwidth_ > 0, "DMA bandwidth must be positive");
}

std::uint64_t MigrationEngine::progress_after(std::uint64_t elapsed_ns) const {
  const double p = std::floor(static_cast<double>(elapsed_ns) * bandwidth_ / 2.0);
  if (p >= static_cast<double>(page_bytes_)) return page_bytes_;
  return static_cast<std::uint64_t>(p);
}

std::uint64_t MigrationEngine::progress_at(std::uint64_t now_ns) const {
  if (!job_) return 0;
  return now_ns <= job_->start_ns ? 0 : progress_after(now_ns - job_->start_ns);
}

std::uint64_t MigrationEngine::time_for_progress(std::uint64_t bytes) const {
  HMMU_CHECK(job_.has_value(), "no active swap");
  auto dt = static_cast<std::uint64_t>(std::ceil(2.0 * static_cast<double>(bytes) / bandwidth_));
  while (dt > 0 && progress_after(dt - 1) >= bytes) --dt;
  while (progress_after(dt) < bytes) ++dt;
  return job_->start_ns + dt;
}

std::uint64_t MigrationEngine::swap_duration_ns() const {
  return static_cast<std::uint64_t>(std::ceil(2.0 * static_cast<double>(page_bytes_) / bandwidth_));
}

std::uint64_t MigrationEngine::completion_ns() const { return time_for_progress(page_bytes_); }

const SwapJob& MigrationEngine::start_swap(std::uint64_t src_host, std::uint64_t src_internal,
                                           std::uint64_t dst_host, std::uint64_t dst_internal,
                                           std::uint64_t now_ns) {
  HMMU_CHECK(!job_, "a page swap is already in flight");
  HMMU_CHECK(now_ns >= clock_, "swap start in the past");
  job_ = SwapJob{src_internal, dst_internal, src_host, dst_host, 0, now_ns, SwapState::Pending};
  chunks_moved_ = 0;
  clock_ = now_ns;
  ++swaps_started_;
  migrated_bytes_ += 2 * page_bytes_;
  return *job_;
}

std::optional<SwapJob> MigrationEngine::advance_to(std::uint64_t now_ns, MemoryStore& store) {
  HMMU_CHECK(now_ns >= clock_, "DMA clock moved backwards");
  clock_ = now_ns;
  if (!job_) return std::nullopt;

  const auto progress = progress_at(now_ns);
  const auto chunks = progress / chunk_bytes_;
  for (; chunks_moved_ < chunks; ++chunks_moved_)
    store.exchange(job_->src_internal, job_->dst_internal, chunks_moved_ * chunk_bytes_, chunk_bytes_);
  job_->progress_bytes = progress;

  if (progress == page_bytes_) {
    job_->state = SwapState::Complete;
    auto done = *job_;
    job_.reset();
    ++swaps_completed_;
    return done;
  }
  if (progress > 0) job_->state = SwapState::Copying;
  return std::nullopt;
}

bool MigrationEngine::involves(std::uint64_t host_page) const {
  return job_ && (job_->src_host == host_page || job_->dst_host == host_page);
}

std::uint64_t MigrationEngine::location(std::uint64_t host_page, std::uint64_t offset) const {
  HMMU_CHECK(involves(host_page), "page is not in flight");
  const bool is_src = host_page == job_->src_host;
  const auto old_page = is_src ? job_->src_internal : job_->dst_internal;
  const auto new_page = is_src ? job_->dst_internal : job_->src_internal;
  return offset / chunk_bytes_ < chunks_moved_ ? new_page : old_page;
}

SwapRoute MigrationEngine::route_conflicting(std::uint64_t host_page, std::uint64_t offset,
                                             AccessKind kind, std::uint64_t now_ns) const {
  HMMU_CHECK(involves(host_page), "page is not in flight");
  const bool is_src = host_page == job_->src_host;
  const auto old_page = is_src ? job_->src_internal : job_->dst_internal;
  const auto new_page = is_src ? job_->dst_internal : job_->src_internal;
  const auto chunk = offset / chunk_bytes_;
  if (chunk < chunks_moved_) return {new_page, 0};
  if (kind == AccessKind::Read) return {old_page, 0};

  const auto progress = progress_at(now_ns);
  if (chunk == progress / chunk_bytes_ && progress % chunk_bytes_ != 0) {
    // Write into the chunk on the wire: hold it until that chunk lands.
    const auto ready = time_for_progress((chunk + 1) * chunk_bytes_);
    return {new_page, ready - now_ns};
  }
  return {old_page, 0};
}

void MigrationEngine::record_block_copy(const BlockCopyJob& job) {
  ++block_copies_;
  migrated_bytes_ += job.bytes;
}

}  // namespace hmmu
