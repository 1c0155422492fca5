#include "hmmu/meter.hpp"

namespace hmmu {

Meter::Meter(const SimConfig& cfg) : block_bytes_(cfg.block_size_bytes) {
  latency_[0][0] = cfg.fast_read_ns;
  latency_[0][1] = cfg.fast_write_ns;
  latency_[1][0] = cfg.slow_read_ns;
  latency_[1][1] = cfg.slow_write_ns;
}

std::uint64_t Meter::charge(const Access& a) {
  HMMU_CHECK(a.bytes > 0, "zero-byte access");
  const std::uint64_t units = (a.bytes + block_bytes_ - 1) / block_bytes_;
  const bool fast = a.tier == Tier::Fast;
  const bool write = a.kind == AccessKind::Write;
  auto& l = ledger_;
  if (a.phase == Phase::Foreground) {
    auto& c = fast ? (write ? l.fast_writes : l.fast_reads) : (write ? l.slow_writes : l.slow_reads);
    c += units;
    const auto ns = latency_[fast ? 0 : 1][write ? 1 : 0];
    l.total_foreground_ns += ns;
    return ns;
  }
  auto& c = fast ? (write ? l.mig_fast_writes : l.mig_fast_reads)
                 : (write ? l.mig_slow_writes : l.mig_slow_reads);
  c += units;
  return 0;
}

void Meter::add_stall(std::uint64_t ns) {
  ++ledger_.write_stalls;
  ledger_.stall_ns += ns;
  ledger_.total_foreground_ns += ns;
}

double background_energy_nj(double mw_per_gb, std::uint64_t fast_bytes, std::uint64_t elapsed_ns) {
  // mW x ns = 1e-12 J = 1e-3 nJ
  const double gib = static_cast<double>(fast_bytes) / static_cast<double>(1ull << 30);
  return mw_per_gb * gib * static_cast<double>(elapsed_ns) * 1e-3;
}

FinalReport finalize(const MeterLedger& l, const SimConfig& cfg, unsigned final_threshold,
                     std::uint64_t search_failures, std::uint64_t content_digest) {
  FinalReport r;
  r.policy = std::string(to_string(cfg.policy));
  r.ledger = l;
  r.elapsed_ns = l.total_foreground_ns;
  auto d = [](std::uint64_t n) { return static_cast<double>(n); };
  r.energy_nj.fast_background =
      background_energy_nj(cfg.fast_background_mw_per_gb, cfg.fast_capacity_bytes, r.elapsed_ns);
  r.energy_nj.fast_read = d(l.fast_reads + l.mig_fast_reads) * cfg.fast_read_nj;
  r.energy_nj.fast_write = d(l.fast_writes + l.mig_fast_writes) * cfg.fast_write_nj;
  r.energy_nj.slow_read = d(l.slow_reads + l.mig_slow_reads) * cfg.slow_read_nj;
  r.energy_nj.slow_write = d(l.slow_writes + l.mig_slow_writes) * cfg.slow_write_nj;

  r.slow_writes_total = l.slow_writes + l.mig_slow_writes;
  const auto fg = l.fast_reads + l.fast_writes + l.slow_reads + l.slow_writes;
  r.fast_hit_fraction = fg ? d(l.fast_reads + l.fast_writes) / d(fg) : 0.0;
  r.final_threshold = final_threshold;
  r.search_failures = search_failures;
  r.content_digest = content_digest;
  return r;
}

void normalize_to(FinalReport& r, const FinalReport& base) {
  r.speedup_vs_alldram = r.elapsed_ns ? static_cast<double>(base.elapsed_ns) / static_cast<double>(r.elapsed_ns)
                                      : 1.0;
  const double e = r.energy_nj.total();
  r.energy_vs_alldram = base.energy_nj.total() > 0 ? e / base.energy_nj.total() : 1.0;
}

bool FinalReport::same_measurements(const FinalReport& o) const {
  FinalReport a = *this;
  a.policy = o.policy;
  return a == o;
}

MetadataCostReport metadata_cost(const MetadataGeometry& g) {
  if (!is_pow2(g.page_bytes)) throw ConfigError("page size must be a power of two");
  if (g.space_bytes < g.page_bytes || g.space_bytes % g.page_bytes)
    throw ConfigError("memory space must be a positive multiple of the page size");
  if (!is_pow2(g.block_bytes) || g.block_bytes > g.page_bytes)
    throw ConfigError("block size must be a power of two no larger than the page");
  if (g.sets == 0) throw ConfigError("set count must be positive");

  MetadataCostReport r;
  r.page_entries = g.space_bytes / g.page_bytes;
  const unsigned addr_bits = log2_ceil(r.page_entries);
  r.bits_per_page_entry = addr_bits + g.stat_bits;
  r.bytes_per_page_entry = (r.bits_per_page_entry + 7) / 8;
  r.total_page_table_bytes = r.page_entries * r.bytes_per_page_entry;
  r.bits_per_cache_set = g.ways * g.hw_tag_bits + (g.ways - 1) + g.ways;
  r.total_cache_meta_bytes = r.bits_per_cache_set * g.sets / 8;

  r.functional_bits_per_page_entry = addr_bits + 4 + kBitmapBits;
  r.functional_bytes_per_page_entry = (r.functional_bits_per_page_entry + 7) / 8;
  r.functional_page_table_bytes = r.page_entries * r.functional_bytes_per_page_entry;
  const unsigned block_bits = log2_ceil(g.space_bytes / g.block_bytes);
  const unsigned set_bits = log2_ceil(g.sets);
  const unsigned tag_bits = block_bits > set_bits ? block_bits - set_bits : 0;
  r.functional_bits_per_cache_set = g.ways * (tag_bits + 1) + (g.ways - 1) + g.ways;
  r.functional_cache_meta_bytes = (static_cast<std::uint64_t>(r.functional_bits_per_cache_set) * g.sets + 7) / 8;
  return r;
}

}  // namespace hmmu
