#include "hmmu/oracle.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

namespace hmmu {

namespace {

struct Way {
  bool valid = false;
  bool dirty = false;
  std::uint64_t tag = 0;
};

struct Swap {
  std::uint64_t src_i, dst_i, src_h, dst_h, start;
  std::uint64_t moved = 0;  // chunks exchanged so far
};

class Oracle {
 public:
  explicit Oracle(const SimConfig& cfg) : c_(cfg), g_(Geometry::of(cfg)) {
    for (std::uint64_t p = 0; p < g_.total_pages; ++p) h2i_[p] = p;
    if (c_.policy == PolicyKind::Static) {
      std::vector<std::uint64_t> perm(g_.total_pages);
      for (std::uint64_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::mt19937_64 rng(c_.rng_seed);
      for (std::uint64_t i = perm.size() - 1; i > 0; --i) {
        std::uniform_int_distribution<std::uint64_t> pick(0, i);
        std::swap(perm[i], perm[pick(rng)]);
      }
      for (std::uint64_t p = 0; p < perm.size(); ++p) h2i_[p] = perm[p];
    }
    for (auto [h, i] : h2i_) i2h_[i] = h;
    threshold_ = c_.promotion_threshold;
    if (c_.policy == PolicyKind::AdpComb) {
      if (threshold_ < c_.adaptive.min_threshold) threshold_ = c_.adaptive.min_threshold;
      if (threshold_ > c_.adaptive.max_threshold) threshold_ = c_.adaptive.max_threshold;
    }
    util_ = (c_.adaptive.hi_water + c_.adaptive.lo_water) / 2.0;
  }

  void request(std::uint64_t seq, const TraceRecord& r, const ReadObserver& obs) {
    const std::uint64_t P = g_.page_bytes, B = g_.block_bytes;
    const std::uint64_t end = g_.total_pages * P;
    if (r.size_bytes == 0 || r.host_addr % B + r.size_bytes > B || r.host_addr + r.size_bytes > end)
      throw TraceError("request #" + std::to_string(seq) + " invalid");
    const bool write = r.kind == AccessKind::Write;
    const std::uint64_t page = r.host_addr / P, off = r.host_addr % P, blk = off / B;
    const std::uint64_t block_id = page * g_.blocks_per_page + blk;
    std::vector<std::uint8_t> bytes(r.size_bytes);
    if (write)
      for (std::uint32_t i = 0; i < r.size_bytes; ++i) bytes[i] = payload_byte(seq, r.host_addr + i);

    progress_to(now_);
    if (migrates() && !candidate_) search();
    recent_.push_back(page);
    if (recent_.size() > c_.bloom_window) recent_.pop_front();
    bitmap_[page] |= static_cast<std::uint8_t>(1u << (blk * 8 / g_.blocks_per_page));
    ++L.requests;

    if (uses_cache()) {
      const std::uint64_t set = block_id & (g_.cache_sets - 1);
      auto& ways = cache_[set];
      int hit = -1;
      for (int w = 0; w < 4; ++w)
        if (ways[w].valid && ways[w].tag == block_id) hit = w;
      if (hit >= 0) {
        touch(set, hit);
        if (h2i_[page] < g_.fast_pages) {
          ++L.recycles;
          if (ways[hit].dirty) put_back(block_id);
          drop_cached(page);
          blocks_.erase(block_id);
          ways[hit] = Way{};
        } else {
          auto& d = blocks_[block_id];
          const std::uint64_t bo = off % B;
          if (write) {
            for (std::size_t i = 0; i < bytes.size(); ++i) d[bo + i] = bytes[i];
            ways[hit].dirty = true;
          } else {
            for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = d[bo + i];
            observe(seq, bytes, obs);
          }
          ++L.cache_hits;
          (write ? L.fast_writes : L.fast_reads) += 1;
          const auto lat = write ? c_.fast_write_ns : c_.fast_read_ns;
          L.total_foreground_ns += lat;
          now_ += lat;
          return;
        }
      }
    }

    std::uint64_t where = 0, stall = 0;
    const bool flight = swap_ && (swap_->src_h == page || swap_->dst_h == page);
    if (flight) {
      ++L.conflict_requests;
      const bool src_side = swap_->src_h == page;
      const std::uint64_t old_p = src_side ? swap_->src_i : swap_->dst_i;
      const std::uint64_t new_p = src_side ? swap_->dst_i : swap_->src_i;
      const std::uint64_t chunk = off / B;
      if (chunk < swap_->moved) {
        where = new_p;
      } else if (!write) {
        where = old_p;
      } else {
        const std::uint64_t prog = progress(now_ - swap_->start);
        if (chunk == prog / B && prog % B != 0) {
          stall = time_for((chunk + 1) * B) - now_;
          ++L.write_stalls;
          L.stall_ns += stall;
          L.total_foreground_ns += stall;
          progress_to(now_ + stall);
          where = new_p;
        } else {
          where = old_p;
        }
      }
    } else {
      where = h2i_[page];
    }

    const bool fast = where < g_.fast_pages;
    const std::uint64_t base = where * P + off;
    if (write) {
      for (std::size_t i = 0; i < bytes.size(); ++i) mem_[base + i] = bytes[i];
    } else {
      for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = byte_at(base + i);
      observe(seq, bytes, obs);
    }
    std::uint64_t lat = 0;
    if (fast) {
      (write ? L.fast_writes : L.fast_reads) += 1;
      lat = write ? c_.fast_write_ns : c_.fast_read_ns;
    } else {
      (write ? L.slow_writes : L.slow_reads) += 1;
      lat = write ? c_.slow_write_ns : c_.slow_read_ns;
    }
    L.total_foreground_ns += lat;

    if (!flight && !fast && migrates()) {
      const bool want_page = !uses_cache() || count_[page] >= threshold_;
      if (want_page) {
        if (candidate_ && !swap_) {
          const std::uint64_t dst = *candidate_;
          candidate_.reset();
          swap_ = Swap{where, dst, page, i2h_[dst], now_};
          const std::uint64_t n = g_.blocks_per_page;
          L.mig_fast_reads += n;
          L.mig_fast_writes += n;
          L.mig_slow_reads += n;
          L.mig_slow_writes += n;
          ++L.page_swaps;
          L.migrated_bytes += 2 * P;
          if (c_.policy == PolicyKind::AdpComb) {
            adapt(bitmap_[page]);
            bitmap_[page] = 0;
          }
        } else {
          ++L.swap_rejections;
        }
      } else {
        cache_block(page, blk, where);
      }
    }
    now_ += stall + lat;
  }

  FinalReport finish() {
    if (swap_) progress_to(std::max(now_, time_for(g_.page_bytes)));
    unsigned thr = uses_cache() ? threshold_ : 0;
    return finalize(L, c_, thr, failures_, digest_);
  }

 private:
  bool migrates() const { return traits(c_.policy).migrates; }
  bool uses_cache() const { return traits(c_.policy).uses_cache; }

  std::uint8_t byte_at(std::uint64_t a) const {
    auto it = mem_.find(a);
    return it == mem_.end() ? 0 : it->second;
  }

  void observe(std::uint64_t seq, const std::vector<std::uint8_t>& bytes, const ReadObserver& obs) {
    for (auto b : bytes) {
      digest_ ^= b;
      digest_ *= 0x100000001b3ull;
    }
    if (obs) obs(seq, bytes);
  }

  std::uint64_t progress(std::uint64_t dt) const {
    const double p = std::floor(static_cast<double>(dt) * c_.dma_bandwidth_bytes_per_ns / 2.0);
    return p >= static_cast<double>(g_.page_bytes) ? g_.page_bytes : static_cast<std::uint64_t>(p);
  }

  std::uint64_t time_for(std::uint64_t bytes) const {
    auto dt = static_cast<std::uint64_t>(std::ceil(2.0 * static_cast<double>(bytes) / c_.dma_bandwidth_bytes_per_ns));
    while (dt > 0 && progress(dt - 1) >= bytes) --dt;
    while (progress(dt) < bytes) ++dt;
    return swap_->start + dt;
  }

  void progress_to(std::uint64_t t) {
    if (!swap_) return;
    const std::uint64_t prog = t <= swap_->start ? 0 : progress(t - swap_->start);
    const std::uint64_t B = g_.block_bytes;
    for (; swap_->moved < prog / B; ++swap_->moved) {
      const std::uint64_t a = swap_->src_i * g_.page_bytes + swap_->moved * B;
      const std::uint64_t b = swap_->dst_i * g_.page_bytes + swap_->moved * B;
      for (std::uint64_t i = 0; i < B; ++i) {
        const auto x = byte_at(a + i), y = byte_at(b + i);
        mem_[a + i] = y;
        mem_[b + i] = x;
      }
    }
    if (prog == g_.page_bytes) {
      h2i_[swap_->src_h] = swap_->dst_i;
      h2i_[swap_->dst_h] = swap_->src_i;
      i2h_[swap_->dst_i] = swap_->src_h;
      i2h_[swap_->src_i] = swap_->dst_h;
      swap_.reset();
    }
  }

  bool recent(std::uint64_t page) const {
    for (auto p : recent_)
      if (p == page) return true;
    return false;
  }

  void search() {
    for (std::uint64_t n = 0; n < 16 * g_.fast_pages; ++n) {
      const std::uint64_t host = mix64(counter_++) % g_.total_pages;
      const std::uint64_t internal = h2i_[host];
      if (internal >= g_.fast_pages || recent(host)) continue;
      if (swap_ && (internal == swap_->src_i || internal == swap_->dst_i)) continue;
      candidate_ = internal;
      return;
    }
    ++failures_;
  }

  void adapt(std::uint8_t bitmap) {
    const auto& a = c_.adaptive;
    if (a.window_pages == 0) return;
    util_ = a.alpha * (std::popcount(bitmap) / 8.0) + (1.0 - a.alpha) * util_;
    if (++samples_ % a.window_pages != 0) return;
    if (util_ > a.hi_water && threshold_ > a.min_threshold) --threshold_;
    else if (util_ < a.lo_water && threshold_ < a.max_threshold) ++threshold_;
  }

  // Tree of three booleans; each points at the less recently used side.
  void touch(std::uint64_t set, int way) {
    auto& t = plru_[set];
    if (way < 2) {
      t[0] = true;
      t[1] = way == 0;
    } else {
      t[0] = false;
      t[2] = way == 2;
    }
  }

  int victim(std::uint64_t set) {
    auto& t = plru_[set];
    if (!t[0]) return t[1] ? 1 : 0;
    return t[2] ? 3 : 2;
  }

  void add_cached(std::uint64_t page) {
    if (count_[page] < 15) ++count_[page];
  }
  void drop_cached(std::uint64_t page) {
    if (count_[page] > 0) --count_[page];
  }

  std::uint64_t home(std::uint64_t page, std::uint64_t off) const {
    if (swap_ && (swap_->src_h == page || swap_->dst_h == page)) {
      const bool src_side = swap_->src_h == page;
      const bool moved = off / g_.block_bytes < swap_->moved;
      if (src_side) return moved ? swap_->dst_i : swap_->src_i;
      return moved ? swap_->src_i : swap_->dst_i;
    }
    return h2i_.at(page);
  }

  // Dirty cached block returns to the page's current home.
  void put_back(std::uint64_t block_id) {
    const std::uint64_t page = block_id / g_.blocks_per_page;
    const std::uint64_t off = (block_id % g_.blocks_per_page) * g_.block_bytes;
    const std::uint64_t dest = home(page, off);
    const auto& d = blocks_.at(block_id);
    for (std::uint64_t i = 0; i < g_.block_bytes; ++i) mem_[dest * g_.page_bytes + off + i] = d[i];
    ++L.mig_fast_reads;
    if (dest < g_.fast_pages) ++L.mig_fast_writes;
    else ++L.mig_slow_writes;
    L.migrated_bytes += g_.block_bytes;
  }

  void cache_block(std::uint64_t page, std::uint64_t blk, std::uint64_t where) {
    const std::uint64_t block_id = page * g_.blocks_per_page + blk;
    const std::uint64_t set = block_id & (g_.cache_sets - 1);
    auto& ways = cache_[set];
    int w = -1;
    for (int i = 0; i < 4 && w < 0; ++i)
      if (!ways[i].valid) w = i;
    if (w < 0) {
      w = victim(set);
      const auto old = ways[w];
      if (old.dirty) {
        ++L.writebacks;
        put_back(old.tag);
      }
      drop_cached(old.tag / g_.blocks_per_page);
      blocks_.erase(old.tag);
    }
    std::vector<std::uint8_t> d(g_.block_bytes);
    const std::uint64_t base = where * g_.page_bytes + blk * g_.block_bytes;
    for (std::uint64_t i = 0; i < g_.block_bytes; ++i) d[i] = byte_at(base + i);
    blocks_[block_id] = std::move(d);
    ways[w] = Way{true, false, block_id};
    touch(set, w);
    add_cached(page);
    ++L.mig_slow_reads;
    ++L.mig_fast_writes;
    ++L.block_copies;
    L.migrated_bytes += g_.block_bytes;
  }

  SimConfig c_;
  Geometry g_;
  MeterLedger L;
  std::uint64_t now_ = 0;
  std::uint64_t digest_ = 0xcbf29ce484222325ull;

  std::map<std::uint64_t, std::uint64_t> h2i_, i2h_;
  std::map<std::uint64_t, std::uint8_t> bitmap_;
  std::map<std::uint64_t, unsigned> count_;
  std::deque<std::uint64_t> recent_;
  std::uint64_t counter_ = 0;
  std::optional<std::uint64_t> candidate_;
  std::uint64_t failures_ = 0;

  std::map<std::uint64_t, std::array<Way, 4>> cache_;
  std::map<std::uint64_t, std::array<bool, 3>> plru_;
  std::map<std::uint64_t, std::vector<std::uint8_t>> blocks_;
  std::unordered_map<std::uint64_t, std::uint8_t> mem_;

  std::optional<Swap> swap_;
  unsigned threshold_ = 0;
  double util_ = 0;
  std::uint64_t samples_ = 0;
};

}  // namespace

FinalReport oracle_run(const SimConfig& cfg, std::span<const TraceRecord> trace, const ReadObserver& on_read) {
  const auto g = Geometry::of(cfg);
  const auto end = footprint_end(trace);
  if (cfg.policy == PolicyKind::AllDRAM && end > cfg.fast_capacity_bytes)
    throw ConfigError("alldram infeasible");
  if (end > g.host_space_bytes()) throw TraceError("trace footprint exceeds configured memory");
  Oracle o(cfg);
  std::uint64_t seq = 0;
  for (const auto& r : trace) o.request(seq++, r, on_read);
  return o.finish();
}

}  // namespace hmmu
