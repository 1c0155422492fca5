#include "hmmu/subpage_cache.hpp"

#include <algorithm>
#include <ostream>

namespace hmmu {

SubpageCache::SubpageCache(const CacheGeometry& geo) : geo_(geo), sets_(geo.sets) {
  HMMU_CHECK(geo_.sets == 0 || is_pow2(geo_.sets), "cache set count must be a power of two");
  data_.assign(geo_.sets * CacheGeometry::ways * geo_.block_bytes, 0);
}

std::span<std::uint8_t> SubpageCache::way_data(std::uint64_t set, unsigned way) {
  return {data_.data() + (set * CacheGeometry::ways + way) * geo_.block_bytes, geo_.block_bytes};
}

std::span<const std::uint8_t> SubpageCache::way_data(std::uint64_t set, unsigned way) const {
  return {data_.data() + (set * CacheGeometry::ways + way) * geo_.block_bytes, geo_.block_bytes};
}

std::optional<unsigned> SubpageCache::find(std::uint64_t block_id) const {
  if (!enabled()) return std::nullopt;
  const auto& s = sets_[set_index(block_id)];
  for (unsigned w = 0; w < CacheGeometry::ways; ++w)
    if (s.ways[w].valid && s.ways[w].tag == block_id) return w;
  return std::nullopt;
}

bool SubpageCache::contains(std::uint64_t block_id) const { return find(block_id).has_value(); }

std::optional<unsigned> SubpageCache::lookup(std::uint64_t block_id) {
  auto w = find(block_id);
  if (w) {
    auto& s = sets_[set_index(block_id)];
    s.plru = plru_touch(s.plru, *w);
  }
  return w;
}

EvictedBlock SubpageCache::take(std::uint64_t set, unsigned way, PageTable& pt) {
  auto& w = sets_[set].ways[way];
  EvictedBlock ev{w.tag, w.dirty, {}};
  if (w.dirty) {
    auto d = way_data(set, way);
    ev.data.assign(d.begin(), d.end());
  }
  pt.decrement_cached(w.tag / geo_.blocks_per_page);
  w = CacheWay{};
  return ev;
}

std::optional<EvictedBlock> SubpageCache::insert(std::uint64_t block_id,
                                                 std::span<const std::uint8_t> data, bool dirty,
                                                 PageTable& pt) {
  HMMU_CHECK(enabled(), "insert into a disabled cache");
  HMMU_CHECK(data.size() == geo_.block_bytes, "block data size mismatch");
  HMMU_CHECK(!find(block_id), "block already resident");
  const auto si = set_index(block_id);
  auto& s = sets_[si];

  std::optional<EvictedBlock> evicted;
  unsigned way = CacheGeometry::ways;
  for (unsigned w = 0; w < CacheGeometry::ways; ++w)
    if (!s.ways[w].valid) {
      way = w;
      break;
    }
  if (way == CacheGeometry::ways) {
    way = plru_victim(s.plru);
    evicted = take(si, way, pt);
  }

  s.ways[way] = CacheWay{block_id, true, dirty};
  std::copy(data.begin(), data.end(), way_data(si, way).begin());
  s.plru = plru_touch(s.plru, way);
  pt.increment_cached(block_id / geo_.blocks_per_page);
  return evicted;
}

void SubpageCache::read(std::uint64_t block_id, std::uint64_t offset, std::span<std::uint8_t> out) const {
  auto w = find(block_id);
  HMMU_CHECK(w.has_value(), "cache access to a non-resident block");
  HMMU_CHECK(offset + out.size() <= geo_.block_bytes, "cache access crosses the block");
  auto d = way_data(set_index(block_id), *w);
  std::copy_n(d.begin() + static_cast<std::ptrdiff_t>(offset), out.size(), out.begin());
}

void SubpageCache::write(std::uint64_t block_id, std::uint64_t offset, std::span<const std::uint8_t> in) {
  auto w = find(block_id);
  HMMU_CHECK(w.has_value(), "cache access to a non-resident block");
  HMMU_CHECK(offset + in.size() <= geo_.block_bytes, "cache access crosses the block");
  const auto si = set_index(block_id);
  std::copy(in.begin(), in.end(), way_data(si, *w).begin() + static_cast<std::ptrdiff_t>(offset));
  sets_[si].ways[*w].dirty = true;
}

std::optional<EvictedBlock> SubpageCache::recycle_if_promoted(std::uint64_t block_id, PageTable& pt) {
  auto w = find(block_id);
  if (!w || !pt.host_is_fast(block_id / geo_.blocks_per_page)) return std::nullopt;
  return take(set_index(block_id), *w, pt);
}

std::uint64_t SubpageCache::valid_blocks() const {
  std::uint64_t n = 0;
  for (const auto& s : sets_)
    for (const auto& w : s.ways) n += w.valid;
  return n;
}

void SubpageCache::dump(std::ostream& os) const {
  os << "# set plru way:tag/valid/dirty x4\n";
  for (std::uint64_t i = 0; i < sets_.size(); ++i) {
    const auto& s = sets_[i];
    os << i << ' ' << ((s.plru >> 2) & 1) << ((s.plru >> 1) & 1) << (s.plru & 1);
    for (const auto& w : s.ways) os << ' ' << w.tag << '/' << w.valid << '/' << w.dirty;
    os << '\n';
  }
}

}  // namespace hmmu
