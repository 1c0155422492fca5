#include "hmmu/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace hmmu {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError("bad integer for " + std::string(key) + ": '" + std::string(v) + "'");
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ConfigError("bad number for " + std::string(key) + ": '" + s + "'");
  return out;
}

}  // namespace

std::string_view to_string(PolicyKind p) {
  switch (p) {
    case PolicyKind::Static: return "static";
    case PolicyKind::PageMove: return "pagemove";
    case PolicyKind::StatComb: return "statcomb";
    case PolicyKind::AdpComb: return "adpcomb";
    case PolicyKind::AllDRAM: return "alldram";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view name) {
  const std::string n = lower(trim(name));
  for (auto p : {PolicyKind::Static, PolicyKind::PageMove, PolicyKind::StatComb,
                 PolicyKind::AdpComb, PolicyKind::AllDRAM})
    if (n == to_string(p)) return p;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

std::vector<PolicyKind> parse_policy_list(std::string_view csv) {
  std::vector<PolicyKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    auto item = trim(csv.substr(start, end - start));
    if (!item.empty()) out.push_back(parse_policy(item));
    start = end + 1;
  }
  if (out.empty()) throw ConfigError("empty policy list");
  return out;
}

std::uint64_t parse_size(std::string_view text) {
  auto t = trim(text);
  std::size_t digits = 0;
  while (digits < t.size() && std::isdigit(static_cast<unsigned char>(t[digits]))) ++digits;
  if (digits == 0) throw ConfigError("bad size '" + std::string(text) + "'");
  const std::uint64_t n = parse_u64("size", t.substr(0, digits));
  const std::string suffix = lower(trim(t.substr(digits)));
  unsigned shift = 0;
  if (suffix.empty() || suffix == "b")
    shift = 0;
  else if (suffix == "kib" || suffix == "k")
    shift = 10;
  else if (suffix == "mib" || suffix == "m")
    shift = 20;
  else if (suffix == "gib" || suffix == "g")
    shift = 30;
  else
    throw ConfigError("bad size suffix in '" + std::string(text) + "'");
  if (shift && n > (~0ull >> shift)) throw ConfigError("size overflows: '" + std::string(text) + "'");
  return n << shift;
}

std::string format_size(std::uint64_t bytes) {
  static constexpr const char* units[] = {"B", "KiB", "MiB", "GiB", "TiB"};
  double v = static_cast<double>(bytes);
  int u = 0;
  while (v >= 1024.0 && u < 4) {
    v /= 1024.0;
    ++u;
  }
  std::ostringstream os;
  os << v << units[u];
  return os.str();
}

const std::vector<std::string>& SimConfig::keys() {
  static const std::vector<std::string> k = {
      "fast_capacity_bytes", "slow_capacity_bytes", "page_size_bytes", "block_size_bytes",
      "cache_zone_bytes", "fast_read_ns", "fast_write_ns", "slow_read_ns", "slow_write_ns",
      "fast_read_nj", "fast_write_nj", "slow_read_nj", "slow_write_nj",
      "fast_background_mw_per_gb", "dma_bandwidth_bytes_per_ns", "promotion_threshold",
      "bloom_window", "policy", "rng_seed", "adaptive_min_threshold", "adaptive_max_threshold",
      "adaptive_window", "adaptive_alpha", "adaptive_hi_water", "adaptive_lo_water", "recency"};
  return k;
}

void SimConfig::set(std::string_view key_in, std::string_view value_in) {
  const std::string key = lower(trim(key_in));
  const auto v = trim(value_in);
  auto u64 = [&] { return parse_u64(key, v); };
  auto dbl = [&] { return parse_double(key, v); };
  auto uint = [&] {
    auto x = u64();
    if (x > 0xFFFFFFFFull) throw ConfigError(key + " out of range");
    return static_cast<unsigned>(x);
  };

  if (key == "fast_capacity_bytes") fast_capacity_bytes = parse_size(v);
  else if (key == "slow_capacity_bytes") slow_capacity_bytes = parse_size(v);
  else if (key == "page_size_bytes") page_size_bytes = parse_size(v);
  else if (key == "block_size_bytes") block_size_bytes = parse_size(v);
  else if (key == "cache_zone_bytes") cache_zone_bytes = parse_size(v);
  else if (key == "fast_read_ns") fast_read_ns = u64();
  else if (key == "fast_write_ns") fast_write_ns = u64();
  else if (key == "slow_read_ns") slow_read_ns = u64();
  else if (key == "slow_write_ns") slow_write_ns = u64();
  else if (key == "fast_read_nj") fast_read_nj = dbl();
  else if (key == "fast_write_nj") fast_write_nj = dbl();
  else if (key == "slow_read_nj") slow_read_nj = dbl();
  else if (key == "slow_write_nj") slow_write_nj = dbl();
  else if (key == "fast_background_mw_per_gb") fast_background_mw_per_gb = dbl();
  else if (key == "dma_bandwidth_bytes_per_ns") dma_bandwidth_bytes_per_ns = dbl();
  else if (key == "promotion_threshold") promotion_threshold = uint();
  else if (key == "bloom_window") bloom_window = u64();
  else if (key == "policy") policy = parse_policy(v);
  else if (key == "rng_seed") rng_seed = u64();
  else if (key == "adaptive_min_threshold") adaptive.min_threshold = uint();
  else if (key == "adaptive_max_threshold") adaptive.max_threshold = uint();
  else if (key == "adaptive_window") adaptive.window_pages = u64();
  else if (key == "adaptive_alpha") adaptive.alpha = dbl();
  else if (key == "adaptive_hi_water") adaptive.hi_water = dbl();
  else if (key == "adaptive_lo_water") adaptive.lo_water = dbl();
  else if (key == "recency") {
    const auto m = lower(v);
    if (m == "bloom") recency = RecencyMode::Bloom;
    else if (m == "exact") recency = RecencyMode::Exact;
    else throw ConfigError("recency must be bloom or exact");
  } else
    throw ConfigError("unknown config key '" + key + "'");
}

void SimConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!is_pow2(page_size_bytes)) fail("page_size_bytes must be a power of two");
  if (!is_pow2(block_size_bytes)) fail("block_size_bytes must be a power of two");
  if (page_size_bytes % block_size_bytes) fail("page_size_bytes must be a multiple of block_size_bytes");
  if (fast_capacity_bytes == 0 || fast_capacity_bytes % page_size_bytes)
    fail("fast_capacity_bytes must be a positive multiple of the page size");
  if (slow_capacity_bytes % page_size_bytes) fail("slow_capacity_bytes must be a multiple of the page size");

  const auto zone = effective_cache_zone_bytes();
  if (zone >= fast_capacity_bytes) fail("cache_zone_bytes must be smaller than fast_capacity_bytes");
  if (zone) {
    const auto set_bytes = block_size_bytes * kCacheWays;
    if (zone % set_bytes) fail("cache_zone_bytes must be a multiple of block_size_bytes x 4");
    if (!is_pow2(zone / set_bytes)) fail("cache set count must be a power of two");
    if ((fast_capacity_bytes - zone) % page_size_bytes)
      fail("fast memory outside the cache zone must be a whole number of pages");
  }

  const auto bpp = page_size_bytes / block_size_bytes;
  const auto thr_max = std::min<std::uint64_t>(bpp, kCachedCountMax);
  if (promotion_threshold < 1 || promotion_threshold > thr_max)
    fail("promotion_threshold must be in [1, " + std::to_string(thr_max) + "]");
  if (bloom_window == 0) fail("bloom_window must be positive");
  if (!(dma_bandwidth_bytes_per_ns > 0)) fail("dma_bandwidth_bytes_per_ns must be positive");

  if (policy == PolicyKind::AdpComb) {
    if (adaptive.min_threshold < 1 || adaptive.min_threshold > adaptive.max_threshold ||
        adaptive.max_threshold > thr_max)
      fail("adaptive threshold bounds must satisfy 1 <= min <= max <= " + std::to_string(thr_max));
    if (!(adaptive.alpha > 0 && adaptive.alpha <= 1)) fail("adaptive_alpha must be in (0, 1]");
    if (adaptive.lo_water > adaptive.hi_water) fail("adaptive_lo_water must not exceed adaptive_hi_water");
  }
  for (double e : {fast_read_nj, fast_write_nj, slow_read_nj, slow_write_nj, fast_background_mw_per_gb})
    if (e < 0) fail("energy parameters must be non-negative");
}

Geometry Geometry::of(const SimConfig& cfg) {
  cfg.validate();
  Geometry g;
  g.page_bytes = cfg.page_size_bytes;
  g.block_bytes = cfg.block_size_bytes;
  g.blocks_per_page = g.page_bytes / g.block_bytes;
  const auto zone = cfg.effective_cache_zone_bytes();
  g.fast_pages = (cfg.fast_capacity_bytes - zone) / g.page_bytes;
  g.slow_pages = cfg.slow_capacity_bytes / g.page_bytes;
  g.total_pages = g.fast_pages + g.slow_pages;
  g.cache_sets = zone / (g.block_bytes * kCacheWays);
  return g;
}

SimConfig load_config(std::istream& in, SimConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view l = line;
    if (auto h = l.find('#'); h != std::string_view::npos) l = l.substr(0, h);
    l = trim(l);
    if (l.empty()) continue;
    auto eq = l.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    try {
      base.set(l.substr(0, eq), l.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

SimConfig load_config_file(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return load_config(in, std::move(base));
}

}  // namespace hmmu
