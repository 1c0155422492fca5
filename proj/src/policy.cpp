#include "hmmu/policy.hpp"

#include <algorithm>
#include <bit>

namespace hmmu {

AdaptiveController::AdaptiveController(const AdaptiveParams& params, unsigned initial_threshold)
    : params_(params),
      threshold_(std::clamp(initial_threshold, params.min_threshold, params.max_threshold)),
      ewma_((params.hi_water + params.lo_water) / 2.0) {}

unsigned AdaptiveController::observe(std::uint8_t access_bitmap) {
  if (!enabled()) return threshold_;
  const double sample = std::popcount(access_bitmap) / static_cast<double>(kBitmapBits);
  ewma_ = params_.alpha * sample + (1.0 - params_.alpha) * ewma_;
  if (++samples_ % params_.window_pages == 0) {
    if (ewma_ > params_.hi_water)
      threshold_ = std::max(params_.min_threshold, threshold_ - 1);
    else if (ewma_ < params_.lo_water)
      threshold_ = std::min(params_.max_threshold, threshold_ + 1);
  }
  return threshold_;
}

Policy::Policy(const SimConfig& cfg)
    : kind_(cfg.policy),
      traits_(hmmu::traits(cfg.policy)),
      static_threshold_(cfg.promotion_threshold),
      adaptive_(cfg.adaptive, cfg.promotion_threshold) {}

unsigned Policy::threshold() const {
  if (!traits_.uses_cache) return 0;
  return traits_.adaptive ? adaptive_.threshold() : static_threshold_;
}

SlowTouchAction Policy::on_slow_touch(unsigned cached_block_count) const {
  if (!traits_.migrates) return SlowTouchAction::Forward;
  if (!traits_.uses_cache) return SlowTouchAction::PageSwap;
  return cached_block_count >= threshold() ? SlowTouchAction::PageSwap : SlowTouchAction::BlockCopy;
}

void Policy::on_promotion(std::uint8_t access_bitmap) {
  if (traits_.adaptive) adaptive_.observe(access_bitmap);
}

}  // namespace hmmu
