#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>

namespace hmmu {

/// Byte contents of the internal page space, allocated lazily; untouched
/// bytes read as zero.
class MemoryStore {
 public:
  explicit MemoryStore(std::uint64_t page_bytes) : page_bytes_(page_bytes) {}

  void read(std::uint64_t internal_page, std::uint64_t offset, std::span<std::uint8_t> out) const;
  void write(std::uint64_t internal_page, std::uint64_t offset, std::span<const std::uint8_t> in);
  /// Exchange `len` bytes at `offset` between two pages.
  void exchange(std::uint64_t page_a, std::uint64_t page_b, std::uint64_t offset, std::uint64_t len);

  std::uint64_t page_bytes() const { return page_bytes_; }
  std::uint64_t resident_pages() const { return pages_.size(); }

 private:
  std::uint8_t* page(std::uint64_t internal_page);

  std::uint64_t page_bytes_;
  std::unordered_map<std::uint64_t, std::unique_ptr<std::uint8_t[]>> pages_;
};

}  // namespace hmmu
