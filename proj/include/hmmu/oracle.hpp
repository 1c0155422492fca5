#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "hmmu/config.hpp"
#include "hmmu/meter.hpp"
#include "hmmu/trace.hpp"

namespace hmmu {

/// Called for each read with (seq, bytes read).
using ReadObserver = std::function<void(std::uint64_t, std::span<const std::uint8_t>)>;

/// Straightforward re-implementation of the whole HMMU pipeline over plain
/// ordered maps, with byte-granular memory and an exact recency queue in
/// place of the bloom filter. Slow, for differential testing only.
FinalReport oracle_run(const SimConfig& cfg, std::span<const TraceRecord> trace,
                       const ReadObserver& on_read = {});

}  // namespace hmmu
