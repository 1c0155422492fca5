#include "hmmu/memory_store.hpp"

#include <algorithm>

#include "hmmu/types.hpp"

namespace hmmu {

std::uint8_t* MemoryStore::page(std::uint64_t internal_page) {
  auto& p = pages_[internal_page];
  if (!p) p = std::make_unique<std::uint8_t[]>(page_bytes_);  // value-initialized
  return p.get();
}

void MemoryStore::read(std::uint64_t internal_page, std::uint64_t offset,
                       std::span<std::uint8_t> out) const {
  HMMU_CHECK(offset + out.size() <= page_bytes_, "read crosses page");
  auto it = pages_.find(internal_page);
  if (it == pages_.end()) {
    std::fill(out.begin(), out.end(), 0);
    return;
  }
  std::copy_n(it->second.get() + offset, out.size(), out.begin());
}

void MemoryStore::write(std::uint64_t internal_page, std::uint64_t offset,
                        std::span<const std::uint8_t> in) {
  HMMU_CHECK(offset + in.size() <= page_bytes_, "write crosses page");
  std::copy(in.begin(), in.end(), page(internal_page) + offset);
}

void MemoryStore::exchange(std::uint64_t page_a, std::uint64_t page_b, std::uint64_t offset,
                           std::uint64_t len) {
  HMMU_CHECK(offset + len <= page_bytes_, "exchange crosses page");
  if (page_a == page_b || len == 0) return;
  if (!pages_.count(page_a) && !pages_.count(page_b)) return;
  auto* a = page(page_a);
  auto* b = page(page_b);
  std::swap_ranges(a + offset, a + offset + len, b + offset);
}

}  // namespace hmmu
