#pragma once

#include <cstdint>

#include "hmmu/config.hpp"

namespace hmmu {

/// Moves the promotion threshold based on how much of each promoted page had
/// been touched: well-used promotions lower it, sparse ones raise it.
class AdaptiveController {
 public:
  AdaptiveController(const AdaptiveParams& params, unsigned initial_threshold);

  unsigned threshold() const { return threshold_; }
  double utilization() const { return ewma_; }
  std::uint64_t samples() const { return samples_; }
  bool enabled() const { return params_.window_pages != 0; }

  /// Feed the access bitmap of a page being promoted.
  unsigned observe(std::uint8_t access_bitmap);

 private:
  AdaptiveParams params_;
  unsigned threshold_;
  double ewma_;
  std::uint64_t samples_ = 0;
};

enum class SlowTouchAction : std::uint8_t { Forward, PageSwap, BlockCopy };

/// Per-policy decision for a request served from slow memory.
class Policy {
 public:
  explicit Policy(const SimConfig& cfg);

  PolicyKind kind() const { return kind_; }
  const PolicyTraits& traits() const { return traits_; }
  unsigned threshold() const;

  SlowTouchAction on_slow_touch(unsigned cached_block_count) const;
  /// Called when a full-page swap starts for a page with the given bitmap.
  void on_promotion(std::uint8_t access_bitmap);

 private:
  PolicyKind kind_;
  PolicyTraits traits_;
  unsigned static_threshold_;
  AdaptiveController adaptive_;
};

}  // namespace hmmu
