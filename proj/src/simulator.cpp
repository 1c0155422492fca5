#include "hmmu/simulator.hpp"

#include <array>

namespace hmmu {

namespace {

CacheGeometry cache_geometry(const Geometry& g) {
  return CacheGeometry{g.block_bytes, g.cache_sets, g.blocks_per_page};
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg)
    : cfg_(cfg),
      geo_(Geometry::of(cfg)),
      pt_(geo_, cfg.bloom_window, cfg.recency),
      cache_(cache_geometry(geo_)),
      dma_(geo_.page_bytes, geo_.block_bytes, cfg.dma_bandwidth_bytes_per_ns),
      store_(geo_.page_bytes),
      meter_(cfg),
      policy_(cfg),
      scratch_(geo_.block_bytes) {
  if (cfg_.policy == PolicyKind::Static) pt_.randomize(cfg_.rng_seed);
}

void Simulator::check_footprint(std::span<const TraceRecord> trace) const {
  const auto end = footprint_end(trace);
  if (cfg_.policy == PolicyKind::AllDRAM && end > cfg_.fast_capacity_bytes)
    throw ConfigError("alldram infeasible: trace footprint " + format_size(end) +
                      " exceeds fast capacity " + format_size(cfg_.fast_capacity_bytes));
  if (end > geo_.host_space_bytes())
    throw TraceError("trace footprint " + format_size(end) + " exceeds configured memory " +
                     format_size(geo_.host_space_bytes()));
}

void Simulator::advance(std::uint64_t t) {
  if (auto done = dma_.advance_to(t, store_)) pt_.apply_swap(*done);
}

void Simulator::search_candidate() {
  if (!policy_.traits().migrates || pt_.candidate_ready()) return;
  std::array<std::uint64_t, 2> busy{};
  std::span<const std::uint64_t> excluded;
  if (const auto& job = dma_.active()) {
    busy = {job->src_internal, job->dst_internal};
    excluded = busy;
  }
  pt_.search_free_fast_page(excluded);
}

std::uint64_t Simulator::home_page(std::uint64_t host_page, std::uint64_t offset) const {
  return dma_.involves(host_page) ? dma_.location(host_page, offset) : pt_.lookup_page(host_page);
}

void Simulator::absorb(std::span<const std::uint8_t> bytes) {
  for (auto b : bytes) {
    digest_ ^= b;
    digest_ *= 0x100000001b3ull;
  }
}

// Dirty data leaving the cache goes to wherever the page lives now.
void Simulator::put_back(const EvictedBlock& ev, bool recycle) {
  auto& l = meter_.ledger();
  if (recycle) ++l.recycles;
  if (!ev.dirty) return;
  if (!recycle) ++l.writebacks;
  const auto host_page = ev.block_id / geo_.blocks_per_page;
  const auto offset = (ev.block_id % geo_.blocks_per_page) * geo_.block_bytes;
  const auto dest = home_page(host_page, offset);
  store_.write(dest, offset, ev.data);
  meter_.charge({Tier::Fast, AccessKind::Read, Phase::Background, geo_.block_bytes});
  meter_.charge({tier_of(dest), AccessKind::Write, Phase::Background, geo_.block_bytes});
  dma_.record_block_copy({ev.block_id,
                          recycle ? BlockCopyDirection::CacheToFast : BlockCopyDirection::CacheToSlow,
                          geo_.block_bytes});
}

void Simulator::try_start_swap(std::uint64_t host_page, std::uint64_t internal, ServiceOutcome& out) {
  if (!pt_.candidate_ready() || dma_.busy()) {
    ++meter_.ledger().swap_rejections;
    out.action = MigrationAction::SwapRejected;
    return;
  }
  const auto dst = pt_.take_candidate();
  dma_.start_swap(host_page, internal, pt_.host_of(dst), dst, now_);
  for (auto tier : {Tier::Fast, Tier::Slow})
    for (auto kind : {AccessKind::Read, AccessKind::Write})
      meter_.charge({tier, kind, Phase::Background, geo_.page_bytes});
  ++meter_.ledger().page_swaps;
  if (policy_.traits().adaptive) {
    policy_.on_promotion(pt_.entry(host_page).access_bitmap);
    pt_.reset_bitmap(host_page);
  }
  out.action = MigrationAction::PageSwapStarted;
}

void Simulator::copy_block_to_cache(std::uint64_t host_page, std::uint64_t block_in_page,
                                    std::uint64_t internal, ServiceOutcome& out) {
  const auto offset = block_in_page * geo_.block_bytes;
  store_.read(internal, offset, scratch_);
  const auto block_id = host_page * geo_.blocks_per_page + block_in_page;
  auto evicted = cache_.insert(block_id, scratch_, false, pt_);
  meter_.charge({Tier::Slow, AccessKind::Read, Phase::Background, geo_.block_bytes});
  meter_.charge({Tier::Fast, AccessKind::Write, Phase::Background, geo_.block_bytes});
  dma_.record_block_copy({block_id, BlockCopyDirection::SlowToCache, geo_.block_bytes});
  ++meter_.ledger().block_copies;
  out.action = MigrationAction::BlockCopy;
  if (evicted) {
    out.evicted_block = evicted->block_id;
    put_back(*evicted, false);
  }
}

ServiceOutcome Simulator::dispatch(const MemoryRequest& req, std::span<std::uint8_t> read_out) {
  const auto seq = std::to_string(req.seq);
  if (req.size_bytes == 0) throw TraceError("request #" + seq + ": zero size");
  if (req.host_addr % geo_.block_bytes + req.size_bytes > geo_.block_bytes)
    throw TraceError("request #" + seq + ": crosses a block boundary");
  if (req.host_addr >= geo_.host_space_bytes() || req.host_addr + req.size_bytes > geo_.host_space_bytes())
    throw TraceError("request #" + seq + ": address 0x" + [&] {
      char b[20];
      std::snprintf(b, sizeof b, "%llx", static_cast<unsigned long long>(req.host_addr));
      return std::string(b);
    }() + " beyond configured capacity");
  HMMU_CHECK(read_out.empty() || read_out.size() == req.size_bytes, "read buffer size mismatch");

  const bool write = req.kind == AccessKind::Write;
  const auto host_page = req.host_addr / geo_.page_bytes;
  const auto page_off = req.host_addr % geo_.page_bytes;
  const auto block_in_page = page_off / geo_.block_bytes;
  const auto block_off = page_off % geo_.block_bytes;

  std::array<std::uint8_t, 4096> local{};
  std::span<std::uint8_t> data =
      read_out.empty() ? (req.size_bytes <= local.size() ? std::span<std::uint8_t>(local.data(), req.size_bytes)
                                                         : std::span<std::uint8_t>(scratch_.data(), req.size_bytes))
                       : read_out;
  if (write)
    for (std::uint32_t i = 0; i < req.size_bytes; ++i) data[i] = payload_byte(req.seq, req.host_addr + i);

  advance(now_);
  search_candidate();
  pt_.record_access(host_page, block_in_page);
  ++meter_.ledger().requests;

  ServiceOutcome out;
  if (cache_.enabled()) {
    const auto block_id = host_page * geo_.blocks_per_page + block_in_page;
    if (cache_.lookup(block_id)) {
      if (auto ev = cache_.recycle_if_promoted(block_id, pt_)) {
        put_back(*ev, true);
        out.recycled = true;
      } else {
        if (write) cache_.write(block_id, block_off, data);
        else cache_.read(block_id, block_off, data);
        out.device = Tier::Fast;
        out.cache_hit = true;
        out.latency_ns = meter_.charge({Tier::Fast, req.kind, Phase::Foreground, req.size_bytes});
        ++meter_.ledger().cache_hits;
        if (!write) absorb(data);
        now_ += out.latency_ns;
        return out;
      }
    }
  }

  std::uint64_t internal = 0;
  if (dma_.involves(host_page)) {
    out.in_flight = true;
    ++meter_.ledger().conflict_requests;
    const auto route = dma_.route_conflicting(host_page, page_off, req.kind, now_);
    if (route.stall_ns) {
      out.stall_ns = route.stall_ns;
      meter_.add_stall(route.stall_ns);
      advance(now_ + route.stall_ns);
    }
    internal = route.internal_page;
  } else {
    internal = pt_.lookup_page(host_page);
  }

  out.device = tier_of(internal);
  if (write) store_.write(internal, page_off, data);
  else store_.read(internal, page_off, data);
  out.latency_ns = out.stall_ns + meter_.charge({out.device, req.kind, Phase::Foreground, req.size_bytes});
  if (!write) absorb(data);

  if (!out.in_flight && out.device == Tier::Slow) {
    switch (policy_.on_slow_touch(pt_.entry(host_page).cached_block_count)) {
      case SlowTouchAction::Forward: break;
      case SlowTouchAction::PageSwap: try_start_swap(host_page, internal, out); break;
      case SlowTouchAction::BlockCopy: copy_block_to_cache(host_page, block_in_page, internal, out); break;
    }
  }

  now_ += out.latency_ns;
  return out;
}

void Simulator::drain() {
  if (!dma_.busy()) return;
  now_ = std::max(now_, dma_.completion_ns());
  advance(now_);
}

FinalReport Simulator::finish() {
  drain();
  auto ledger = meter_.ledger();
  ledger.migrated_bytes = dma_.migrated_bytes();
  return finalize(ledger, cfg_, policy_.threshold(), pt_.search_failures(), digest_);
}

FinalReport Simulator::run(std::span<const TraceRecord> trace) {
  check_footprint(trace);
  std::uint64_t seq = 0;
  for (const auto& r : trace) dispatch({r.kind, r.host_addr, r.size_bytes, seq++});
  return finish();
}

FinalReport simulate(const SimConfig& cfg, std::span<const TraceRecord> trace) {
  Simulator sim(cfg);
  return sim.run(trace);
}

}  // namespace hmmu
