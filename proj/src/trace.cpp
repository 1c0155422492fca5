#include "hmmu/trace.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

namespace hmmu {

std::vector<TraceRecord> split_at_blocks(const TraceRecord& r, std::uint64_t block_bytes) {
  std::vector<TraceRecord> out;
  std::uint64_t addr = r.host_addr;
  std::uint64_t left = r.size_bytes;
  while (left > 0) {
    const std::uint64_t room = block_bytes - addr % block_bytes;
    const std::uint64_t n = std::min(room, left);
    out.push_back({r.kind, addr, static_cast<std::uint32_t>(n)});
    addr += n;
    left -= n;
  }
  return out;
}

namespace {

TraceError line_error(std::size_t lineno, const std::string& what) {
  return TraceError("trace line " + std::to_string(lineno) + ": " + what);
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in, std::uint64_t block_bytes) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string op, addr, size, extra;
    if (!(ls >> op)) continue;
    if (op != "R" && op != "W" && op != "r" && op != "w")
      throw line_error(lineno, "unknown access kind '" + op + "'");
    if (!(ls >> addr)) throw line_error(lineno, "missing address");
    TraceRecord rec;
    rec.kind = (op == "W" || op == "w") ? AccessKind::Write : AccessKind::Read;

    std::string_view a = addr;
    if (a.size() > 2 && a[0] == '0' && (a[1] == 'x' || a[1] == 'X')) a.remove_prefix(2);
    auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), rec.host_addr, 16);
    if (ec != std::errc{} || p != a.data() + a.size()) throw line_error(lineno, "bad address '" + addr + "'");

    if (ls >> size) {
      std::uint64_t s = 0;
      auto [q, ec2] = std::from_chars(size.data(), size.data() + size.size(), s);
      if (ec2 != std::errc{} || q != size.data() + size.size() || s > 0xFFFFFFFFull)
        throw line_error(lineno, "bad size '" + size + "'");
      if (s == 0) throw line_error(lineno, "size must be positive");
      rec.size_bytes = static_cast<std::uint32_t>(s);
    }
    if (ls >> extra) throw line_error(lineno, "unexpected trailing field '" + extra + "'");
    for (const auto& piece : split_at_blocks(rec, block_bytes)) out.push_back(piece);
  }
  return out;
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& path, std::uint64_t block_bytes) {
  gzFile f = gzopen(path.string().c_str(), "rb");  // also reads uncompressed files
  if (!f) throw TraceError("cannot open trace " + path.string());
  std::string text;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw TraceError("read error in trace " + path.string());
  std::istringstream in(text);
  return parse_trace(in, block_bytes);
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records) {
  char buf[48];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%c 0x%llx %u\n", r.kind == AccessKind::Write ? 'W' : 'R',
                  static_cast<unsigned long long>(r.host_addr), r.size_bytes);
    out << buf;
  }
}

void save_trace(const std::filesystem::path& path, std::span<const TraceRecord> records) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write trace " + path.string());
  write_trace(out, records);
}

std::uint64_t footprint_end(std::span<const TraceRecord> records) {
  std::uint64_t end = 0;
  for (const auto& r : records) end = std::max(end, r.host_addr + r.size_bytes);
  return end;
}

namespace {

constexpr std::pair<WorkloadKind, std::string_view> kKindNames[] = {
    {WorkloadKind::Sequential, "sequential"},   {WorkloadKind::Strided, "strided"},
    {WorkloadKind::Zipfian, "zipfian"},         {WorkloadKind::SparseWide, "sparse-wide"},
    {WorkloadKind::StreamingStore, "streaming-store"}, {WorkloadKind::Mixed, "mixed"}};

}  // namespace

WorkloadKind parse_workload_kind(std::string_view name) {
  for (auto [k, n] : kKindNames)
    if (n == name) return k;
  throw ConfigError("unknown workload kind '" + std::string(name) + "'");
}

std::string_view to_string(WorkloadKind k) {
  for (auto [kk, n] : kKindNames)
    if (kk == k) return n;
  return "?";
}

namespace {

class Generator {
 public:
  explicit Generator(const WorkloadSpec& s)
      : s_(s),
        rng_(s.seed),
        wf_(s.write_fraction.value_or(s.kind == WorkloadKind::StreamingStore ? 0.8 : 0.3)),
        pages_(s.footprint_bytes / s.page_bytes),
        lines_per_block_(s.block_bytes / s.request_bytes) {}

  std::vector<TraceRecord> run() {
    out_.reserve(s_.request_count);
    switch (s_.kind) {
      case WorkloadKind::Sequential:
      case WorkloadKind::StreamingStore: sequential(); break;
      case WorkloadKind::Strided: strided(); break;
      case WorkloadKind::Zipfian: zipfian(); break;
      case WorkloadKind::SparseWide: sparse_wide(); break;
      case WorkloadKind::Mixed: mixed(); break;
    }
    return std::move(out_);
  }

 private:
  bool full() const { return out_.size() >= s_.request_count; }

  void emit(std::uint64_t offset) {
    const bool write = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < wf_;
    out_.push_back({write ? AccessKind::Write : AccessKind::Read, s_.base_addr + offset, s_.request_bytes});
  }

  std::uint64_t uniform(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }

  std::vector<std::uint64_t> permutation(std::uint64_t n) {
    std::vector<std::uint64_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (std::uint64_t i = n - 1; i > 0; --i) std::swap(p[i], p[uniform(i + 1)]);
    return p;
  }

  // A request-sized line within block `block` of page `page`.
  std::uint64_t line_in(std::uint64_t page, std::uint64_t block) {
    return page * s_.page_bytes + block * s_.block_bytes + uniform(lines_per_block_) * s_.request_bytes;
  }

  void sequential() {
    for (std::uint64_t i = 0; !full(); ++i) emit((i * s_.request_bytes) % s_.footprint_bytes);
  }

  void strided() {
    const auto lines = s_.footprint_bytes / s_.request_bytes;
    const auto stride = std::max<std::uint64_t>(1, s_.stride_bytes / s_.request_bytes);
    for (std::uint64_t i = 0; !full(); ++i) {
      const auto pass = (i * stride) / lines;
      emit(((i * stride + pass) % lines) * s_.request_bytes);
    }
  }

  void zipfian() {
    std::vector<double> cdf(pages_);
    double sum = 0;
    for (std::uint64_t r = 0; r < pages_; ++r) {
      sum += 1.0 / std::pow(static_cast<double>(r + 1), s_.zipf_s);
      cdf[r] = sum;
    }
    const auto rank_to_page = permutation(pages_);
    const auto bpp = s_.page_bytes / s_.block_bytes;
    std::uniform_real_distribution<double> u(0.0, sum);
    while (!full()) {
      const double x = u(rng_);
      auto rank = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
      rank = std::min(rank, pages_ - 1);
      emit(line_in(rank_to_page[rank], uniform(bpp)));
    }
  }

  void sparse_wide() {
    const auto bpp = s_.page_bytes / s_.block_bytes;
    std::vector<std::uint64_t> block_of(pages_);
    for (auto& b : block_of) b = uniform(bpp);
    while (!full())
      for (auto page : permutation(pages_)) {
        if (full()) break;
        emit(page * s_.page_bytes + block_of[page] * s_.block_bytes);
      }
  }

  // Half the pages are dense (most blocks touched), half sparse (1-3 blocks).
  void mixed() {
    const auto bpp = s_.page_bytes / s_.block_bytes;
    while (!full())
      for (auto page : permutation(pages_)) {
        if (full()) break;
        const bool dense = uniform(2) == 0;
        const auto lo = dense ? std::max<std::uint64_t>(1, bpp / 2) : 1;
        const auto hi = dense ? bpp : std::min<std::uint64_t>(3, bpp);
        const auto n = lo + uniform(hi - lo + 1);
        auto blocks = permutation(bpp);
        for (std::uint64_t i = 0; i < n && !full(); ++i) emit(line_in(page, blocks[i]));
      }
  }

  const WorkloadSpec& s_;
  std::mt19937_64 rng_;
  double wf_;
  std::uint64_t pages_;
  std::uint64_t lines_per_block_;
  std::vector<TraceRecord> out_;
};

}  // namespace

std::vector<TraceRecord> generate(const WorkloadSpec& spec, std::uint64_t address_space_bytes) {
  if (!is_pow2(spec.page_bytes) || !is_pow2(spec.block_bytes) || spec.block_bytes > spec.page_bytes)
    throw ConfigError("workload page/block sizes must be powers of two with block <= page");
  if (spec.request_bytes == 0 || !is_pow2(spec.request_bytes) || spec.request_bytes > spec.block_bytes)
    throw ConfigError("request size must be a power of two no larger than a block");
  if (spec.footprint_bytes < spec.page_bytes || spec.footprint_bytes % spec.page_bytes)
    throw ConfigError("footprint must be a positive multiple of the page size");
  if (spec.base_addr % spec.page_bytes) throw ConfigError("base address must be page aligned");
  if (spec.base_addr > address_space_bytes || spec.footprint_bytes > address_space_bytes - spec.base_addr)
    throw ConfigError("workload footprint exceeds the address space");
  if (spec.write_fraction && (*spec.write_fraction < 0 || *spec.write_fraction > 1))
    throw ConfigError("write fraction must be in [0, 1]");
  return Generator(spec).run();
}

}  // namespace hmmu
