#pragma once

#include <cstdint>

namespace hmmu {

enum class SwapState : std::uint8_t { Pending, Copying, Complete };

/// In-flight exchange of a slow page (`src`) with a fast candidate page (`dst`).
/// Both directions advance together, so a single progress value covers both.
struct SwapJob {
  std::uint64_t src_internal = 0;
  std::uint64_t dst_internal = 0;
  std::uint64_t src_host = 0;  // host page currently mapped to src_internal
  std::uint64_t dst_host = 0;  // host page currently mapped to dst_internal
  std::uint64_t progress_bytes = 0;
  std::uint64_t start_ns = 0;
  SwapState state = SwapState::Pending;

  bool operator==(const SwapJob&) const = default;
};

}  // namespace hmmu
