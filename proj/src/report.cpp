#include "hmmu/report.hpp"

#include <cstdio>
#include <sstream>

#include "hmmu/config.hpp"

namespace hmmu {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::ordered_json to_json(const FinalReport& r) {
  const auto& l = r.ledger;
  nlohmann::ordered_json j;
  j["schema_version"] = FinalReport::kSchemaVersion;
  j["policy"] = r.policy;
  j["requests"] = l.requests;
  j["foreground"] = {{"fast_reads", l.fast_reads},
                     {"fast_writes", l.fast_writes},
                     {"slow_reads", l.slow_reads},
                     {"slow_writes", l.slow_writes},
                     {"cache_hits", l.cache_hits}};
  j["migration"] = {{"fast_reads", l.mig_fast_reads},
                    {"fast_writes", l.mig_fast_writes},
                    {"slow_reads", l.mig_slow_reads},
                    {"slow_writes", l.mig_slow_writes},
                    {"page_swaps", l.page_swaps},
                    {"swap_rejections", l.swap_rejections},
                    {"block_copies", l.block_copies},
                    {"writebacks", l.writebacks},
                    {"recycles", l.recycles},
                    {"bytes", l.migrated_bytes}};
  j["time"] = {{"total_foreground_ns", l.total_foreground_ns},
               {"elapsed_ns", r.elapsed_ns},
               {"conflict_requests", l.conflict_requests},
               {"write_stalls", l.write_stalls},
               {"stall_ns", l.stall_ns}};
  j["energy_nj"] = {{"fast_background", r.energy_nj.fast_background},
                    {"fast_read", r.energy_nj.fast_read},
                    {"fast_write", r.energy_nj.fast_write},
                    {"slow_read", r.energy_nj.slow_read},
                    {"slow_write", r.energy_nj.slow_write},
                    {"total", r.energy_nj.total()}};
  j["derived"] = {{"slow_writes_total", r.slow_writes_total},
                  {"fast_hit_fraction", r.fast_hit_fraction},
                  {"final_threshold", r.final_threshold},
                  {"search_failures", r.search_failures},
                  {"content_digest", hex64(r.content_digest)}};
  if (r.speedup_vs_alldram)
    j["normalized"] = {{"speedup_vs_alldram", *r.speedup_vs_alldram},
                       {"energy_vs_alldram", r.energy_vs_alldram.value_or(0.0)}};
  return j;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "policy", "requests", "fast_reads", "fast_writes", "slow_reads", "slow_writes", "cache_hits",
      "mig_fast_reads", "mig_fast_writes", "mig_slow_reads", "mig_slow_writes", "page_swaps",
      "swap_rejections", "block_copies", "writebacks", "recycles", "migrated_bytes",
      "total_foreground_ns", "elapsed_ns", "conflict_requests", "write_stalls", "stall_ns",
      "energy_fast_background_nj", "energy_fast_read_nj", "energy_fast_write_nj",
      "energy_slow_read_nj", "energy_slow_write_nj", "energy_total_nj", "slow_writes_total",
      "fast_hit_fraction", "final_threshold", "search_failures", "content_digest",
      "speedup_vs_alldram", "energy_vs_alldram"};
  return cols;
}

std::string csv_header() {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

std::string to_csv_row(const FinalReport& r) {
  const auto& l = r.ledger;
  std::ostringstream os;
  os << r.policy << ',' << l.requests << ',' << l.fast_reads << ',' << l.fast_writes << ','
     << l.slow_reads << ',' << l.slow_writes << ',' << l.cache_hits << ',' << l.mig_fast_reads << ','
     << l.mig_fast_writes << ',' << l.mig_slow_reads << ',' << l.mig_slow_writes << ','
     << l.page_swaps << ',' << l.swap_rejections << ',' << l.block_copies << ',' << l.writebacks
     << ',' << l.recycles << ',' << l.migrated_bytes << ',' << l.total_foreground_ns << ','
     << r.elapsed_ns << ',' << l.conflict_requests << ',' << l.write_stalls << ',' << l.stall_ns
     << ',' << num(r.energy_nj.fast_background) << ',' << num(r.energy_nj.fast_read) << ','
     << num(r.energy_nj.fast_write) << ',' << num(r.energy_nj.slow_read) << ','
     << num(r.energy_nj.slow_write) << ',' << num(r.energy_nj.total()) << ','
     << r.slow_writes_total << ',' << num(r.fast_hit_fraction) << ',' << r.final_threshold << ','
     << r.search_failures << ',' << hex64(r.content_digest) << ','
     << (r.speedup_vs_alldram ? num(*r.speedup_vs_alldram) : "") << ','
     << (r.energy_vs_alldram ? num(*r.energy_vs_alldram) : "");
  return os.str();
}

std::string format_metadata_cost(const MetadataCostReport& r) {
  std::ostringstream os;
  os << "page table: " << r.bits_per_page_entry << " bits/entry -> " << r.bytes_per_page_entry
     << " bytes/entry, " << r.page_entries << " entries, " << format_size(r.total_page_table_bytes)
     << " total\n";
  os << "cache metadata: " << r.bits_per_cache_set << " bits/set, "
     << format_size(r.total_cache_meta_bytes) << " total\n";
  os << "functional page table: " << r.functional_bits_per_page_entry << " bits/entry -> "
     << r.functional_bytes_per_page_entry << " bytes/entry, "
     << format_size(r.functional_page_table_bytes) << " total\n";
  os << "functional cache metadata: " << r.functional_bits_per_cache_set << " bits/set, "
     << format_size(r.functional_cache_meta_bytes) << " total\n";
  return os.str();
}

}  // namespace hmmu
