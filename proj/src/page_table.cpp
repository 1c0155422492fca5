#include "hmmu/page_table.hpp"

#include <algorithm>
#include <ostream>
#include <random>

namespace hmmu {

PageTable::PageTable(const Geometry& geo, std::uint64_t bloom_window, RecencyMode mode)
    : geo_(geo), entries_(geo.total_pages), inverse_(geo.total_pages), recency_(bloom_window, mode) {
  HMMU_CHECK(geo_.total_pages > 0, "page table needs at least one page");
  for (std::uint64_t i = 0; i < entries_.size(); ++i) {
    entries_[i].internal_page = i;
    inverse_[i] = i;
  }
}

void PageTable::randomize(std::uint64_t seed) {
  std::vector<std::uint64_t> perm(entries_.size());
  for (std::uint64_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937_64 rng(seed);
  for (std::uint64_t i = perm.size() - 1; i > 0; --i) {
    std::uniform_int_distribution<std::uint64_t> pick(0, i);
    std::swap(perm[i], perm[pick(rng)]);
  }
  assign(perm);
}

void PageTable::assign(std::span<const std::uint64_t> host_to_internal) {
  HMMU_CHECK(host_to_internal.size() == entries_.size(), "mapping size mismatch");
  std::vector<std::uint64_t> inv(entries_.size(), ~0ull);
  for (std::uint64_t h = 0; h < host_to_internal.size(); ++h) {
    const auto i = host_to_internal[h];
    HMMU_CHECK(i < inv.size() && inv[i] == ~0ull, "mapping is not a permutation");
    inv[i] = h;
  }
  for (std::uint64_t h = 0; h < host_to_internal.size(); ++h)
    entries_[h].internal_page = host_to_internal[h];
  inverse_ = std::move(inv);
}

std::uint64_t PageTable::lookup(std::uint64_t host_addr) const {
  return lookup_page(host_addr / geo_.page_bytes);
}

std::uint64_t PageTable::lookup_page(std::uint64_t host_page) const {
  if (host_page >= entries_.size())
    throw TraceError("host page " + std::to_string(host_page) + " beyond configured capacity");
  return entries_[host_page].internal_page;
}

std::uint64_t PageTable::host_of(std::uint64_t internal_page) const {
  HMMU_CHECK(internal_page < inverse_.size(), "internal page out of range");
  return inverse_[internal_page];
}

const PageTableEntry& PageTable::entry(std::uint64_t host_page) const {
  HMMU_CHECK(host_page < entries_.size(), "host page out of range");
  return entries_[host_page];
}

unsigned PageTable::bitmap_bit(std::uint64_t block_in_page) const {
  return static_cast<unsigned>(block_in_page * kBitmapBits / geo_.blocks_per_page);
}

void PageTable::record_access(std::uint64_t host_page, std::uint64_t block_in_page) {
  HMMU_CHECK(host_page < entries_.size(), "host page out of range");
  recency_.insert(host_page);
  entries_[host_page].access_bitmap |= static_cast<std::uint8_t>(1u << bitmap_bit(block_in_page));
}

void PageTable::reset_bitmap(std::uint64_t host_page) { entries_.at(host_page).access_bitmap = 0; }

void PageTable::increment_cached(std::uint64_t host_page) {
  auto& c = entries_.at(host_page).cached_block_count;
  if (c < kCachedCountMax) ++c;
}

void PageTable::decrement_cached(std::uint64_t host_page) {
  auto& c = entries_.at(host_page).cached_block_count;
  if (c > 0) --c;
}

std::optional<std::uint64_t> PageTable::search_free_fast_page(std::span<const std::uint64_t> excluded) {
  if (search_.candidate_ready) return search_.candidate;
  const std::uint64_t budget = 16 * geo_.fast_pages;
  for (std::uint64_t probes = 0; probes < budget; ++probes) {
    const std::uint64_t host = probe_index(search_.counter++, entries_.size());
    const std::uint64_t internal = entries_[host].internal_page;
    if (!is_fast(internal) || recency_.contains(host)) continue;
    if (std::find(excluded.begin(), excluded.end(), internal) != excluded.end()) continue;
    search_.candidate = internal;
    search_.candidate_ready = true;
    return internal;
  }
  ++search_failures_;
  return std::nullopt;
}

std::uint64_t PageTable::take_candidate() {
  HMMU_CHECK(search_.candidate_ready && search_.candidate, "no ready candidate");
  const auto c = *search_.candidate;
  search_.candidate.reset();
  search_.candidate_ready = false;
  return c;
}

void PageTable::apply_swap(const SwapJob& job) {
  HMMU_CHECK(job.state == SwapState::Complete, "swap_mappings on a swap that has not completed");
  HMMU_CHECK(entries_.at(job.src_host).internal_page == job.src_internal &&
                 entries_.at(job.dst_host).internal_page == job.dst_internal,
             "swap job does not match the current mapping");
  std::swap(entries_[job.src_host].internal_page, entries_[job.dst_host].internal_page);
  inverse_[job.src_internal] = job.dst_host;
  inverse_[job.dst_internal] = job.src_host;
}

bool PageTable::is_bijection() const {
  std::vector<bool> seen(entries_.size(), false);
  for (std::uint64_t h = 0; h < entries_.size(); ++h) {
    const auto i = entries_[h].internal_page;
    if (i >= seen.size() || seen[i] || inverse_[i] != h) return false;
    seen[i] = true;
  }
  return true;
}

void PageTable::dump(std::ostream& os) const {
  os << "# host_page internal_page cached_blocks access_bitmap\n";
  for (std::uint64_t h = 0; h < entries_.size(); ++h) {
    const auto& e = entries_[h];
    os << h << ' ' << e.internal_page << ' ' << unsigned(e.cached_block_count) << ' ';
    for (int b = kBitmapBits - 1; b >= 0; --b) os << ((e.access_bitmap >> b) & 1u);
    os << '\n';
  }
}

}  // namespace hmmu
