#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hmmu/config.hpp"
#include "hmmu/report.hpp"
#include "hmmu/simulator.hpp"
#include "hmmu/trace.hpp"

namespace hmmu::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string config_path;
  std::string trace_path;
  std::string gen_kind;
  std::uint64_t pages = 0;
  std::string footprint;
  std::uint64_t requests = 100000;
  double write_fraction = -1;
  std::uint64_t gen_seed = 1;
  std::string stride = "4KiB";
  double zipf_s = 0.99;
  std::string base = "0";
  std::string policies = "pagemove";

  std::string fast_size, slow_size, page_size, block_size, cache_size;
  std::string threshold, adaptive, bloom_window, dma_bw, seed, recency;

  std::string param;
  std::string values;
  std::string out;
  std::string format = "json";
  unsigned jobs = 0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--trace", o.trace_path, "trace file (plain or gzip)");
  cmd->add_option("--gen", o.gen_kind, "synthetic workload kind")
      ->check(CLI::IsMember({"sequential", "strided", "zipfian", "sparse-wide", "streaming-store", "mixed"}));
  cmd->add_option("--pages", o.pages, "workload footprint in pages");
  cmd->add_option("--footprint", o.footprint, "workload footprint (e.g. 64MiB)");
  cmd->add_option("--requests", o.requests, "generated request count");
  cmd->add_option("--write-fraction", o.write_fraction, "generated write fraction");
  cmd->add_option("--gen-seed", o.gen_seed, "workload generator seed");
  cmd->add_option("--stride", o.stride, "stride for strided workloads");
  cmd->add_option("--zipf-s", o.zipf_s, "zipf exponent");
  cmd->add_option("--base", o.base, "workload base address");
  cmd->add_option("--policy", o.policies, "comma-separated policies");
  cmd->add_option("--fast-size", o.fast_size);
  cmd->add_option("--slow-size", o.slow_size);
  cmd->add_option("--page-size", o.page_size);
  cmd->add_option("--block-size", o.block_size);
  cmd->add_option("--cache-size", o.cache_size);
  cmd->add_option("--threshold", o.threshold, "promotion threshold");
  cmd->add_option("--adaptive", o.adaptive, "adaptive window in promotions (0 disables)");
  cmd->add_option("--bloom-window", o.bloom_window);
  cmd->add_option("--dma-bw", o.dma_bw, "DMA bandwidth, bytes/ns");
  cmd->add_option("--seed", o.seed);
  cmd->add_option("--recency", o.recency, "bloom | exact");
  cmd->add_option("--out", o.out, "output file (default stdout)");
  cmd->add_option("--format", o.format)->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--jobs", o.jobs, "parallel runs (0 = hardware threads)");
}

SimConfig build_config(const Options& o) {
  SimConfig cfg;
  if (!o.config_path.empty()) cfg = load_config_file(o.config_path);
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) cfg.set(key, v);
  };
  set("fast_capacity_bytes", o.fast_size);
  set("slow_capacity_bytes", o.slow_size);
  set("page_size_bytes", o.page_size);
  set("block_size_bytes", o.block_size);
  set("cache_zone_bytes", o.cache_size);
  set("promotion_threshold", o.threshold);
  set("adaptive_window", o.adaptive);
  set("bloom_window", o.bloom_window);
  set("dma_bandwidth_bytes_per_ns", o.dma_bw);
  set("rng_seed", o.seed);
  set("recency", o.recency);
  return cfg;
}

std::vector<TraceRecord> build_trace(const Options& o, const SimConfig& cfg) {
  if (!o.trace_path.empty() && !o.gen_kind.empty())
    throw ConfigError("--trace and --gen are mutually exclusive");
  if (!o.trace_path.empty()) return load_trace(o.trace_path, cfg.block_size_bytes);
  if (o.gen_kind.empty()) throw ConfigError("one of --trace or --gen is required");
  WorkloadSpec w;
  w.kind = parse_workload_kind(o.gen_kind);
  w.page_bytes = cfg.page_size_bytes;
  w.block_bytes = cfg.block_size_bytes;
  w.footprint_bytes = o.pages ? o.pages * cfg.page_size_bytes
                              : (o.footprint.empty() ? (1ull << 20) : parse_size(o.footprint));
  w.request_count = o.requests;
  if (o.write_fraction >= 0) w.write_fraction = o.write_fraction;
  w.seed = o.gen_seed;
  w.stride_bytes = parse_size(o.stride);
  w.zipf_s = o.zipf_s;
  w.base_addr = parse_size(o.base);
  w.request_bytes = static_cast<std::uint32_t>(std::min<std::uint64_t>(kDefaultRequestBytes, cfg.block_size_bytes));
  return generate(w);
}

struct RunResult {
  SimConfig cfg;
  std::string label;
  std::optional<FinalReport> report;
  std::string error;
};

void execute(std::vector<RunResult>& runs, const std::vector<TraceRecord>& trace, unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  auto one = [&trace](RunResult& r) {
    try {
      r.report = simulate(r.cfg, trace);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };
  for (std::size_t i = 0; i < runs.size(); i += jobs) {
    std::vector<std::future<void>> batch;
    for (std::size_t k = i; k < std::min(runs.size(), i + jobs); ++k)
      batch.push_back(std::async(std::launch::async, one, std::ref(runs[k])));
    for (auto& f : batch) f.get();
  }
}

void normalize_runs(std::vector<RunResult>& runs) {
  const FinalReport* base = nullptr;
  for (const auto& r : runs)
    if (r.report && r.cfg.policy == PolicyKind::AllDRAM) base = &*r.report;
  if (!base) return;
  const FinalReport b = *base;
  for (auto& r : runs)
    if (r.report) normalize_to(*r.report, b);
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  const fs::path dst(o.out);
  fs::path tmp = dst;
  tmp += ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw ConfigError("cannot write " + tmp.string());
    f << text;
  }
  fs::rename(tmp, dst);
}

std::string render_runs(const Options& o, const std::vector<RunResult>& runs, const json& extra) {
  if (o.format == "csv") {
    std::string s = "label," + csv_header() + ",error\n";
    for (const auto& r : runs) {
      s += r.label + ',';
      if (r.report) s += to_csv_row(*r.report);
      else s += std::string(to_string(r.cfg.policy)) + std::string(csv_columns().size() - 1, ',');
      s += ',' + (r.error.empty() ? std::string() : "\"" + r.error + "\"") + '\n';
    }
    return s;
  }
  json j;
  j["schema_version"] = FinalReport::kSchemaVersion;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["runs"] = json::array();
  for (const auto& r : runs) {
    json e;
    e["label"] = r.label;
    if (r.report) {
      e["status"] = "ok";
      e["report"] = to_json(*r.report);
    } else {
      e["status"] = "failed";
      e["policy"] = std::string(to_string(r.cfg.policy));
      e["error"] = r.error;
    }
    j["runs"].push_back(e);
  }
  return j.dump(2) + "\n";
}

json comparison(const std::vector<RunResult>& runs) {
  json rows = json::array();
  for (const auto& r : runs) {
    if (!r.report) continue;
    const auto& rep = *r.report;
    json row{{"label", r.label},
             {"policy", rep.policy},
             {"runtime_ns", rep.elapsed_ns},
             {"energy_nj", rep.energy_nj.total()},
             {"slow_writes_total", rep.slow_writes_total},
             {"fast_hit_fraction", rep.fast_hit_fraction}};
    if (rep.speedup_vs_alldram) {
      row["speedup_vs_alldram"] = *rep.speedup_vs_alldram;
      row["energy_vs_alldram"] = *rep.energy_vs_alldram;
    }
    rows.push_back(row);
  }
  return rows;
}

bool all_ok(const std::vector<RunResult>& runs) {
  for (const auto& r : runs)
    if (!r.report) return false;
  return true;
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  const SimConfig base = build_config(o);
  const auto trace = build_trace(o, base);
  std::vector<RunResult> runs;
  for (auto p : parse_policy_list(o.policies)) {
    SimConfig c = base;
    c.policy = p;
    runs.push_back({c, std::string(to_string(p)), std::nullopt, {}});
  }
  execute(runs, trace, o.jobs);
  normalize_runs(runs);
  for (const auto& r : runs)
    if (!r.report) err << "run " << r.label << " failed: " << r.error << "\n";
  emit(o, render_runs(o, runs, json{{"comparison", comparison(runs)}}), out);
  return all_ok(runs) ? 0 : 1;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.param.empty() || o.values.empty()) throw ConfigError("sweep needs --param and --values");
  const SimConfig base = build_config(o);
  const auto trace = build_trace(o, base);
  const auto values = split_csv(o.values);
  std::vector<RunResult> runs;
  for (auto p : parse_policy_list(o.policies))
    for (const auto& v : values) {
      SimConfig c = base;
      c.policy = p;
      c.set(o.param, v);
      runs.push_back({c, std::string(to_string(p)) + ":" + o.param + "=" + v, std::nullopt, {}});
    }
  execute(runs, trace, o.jobs);
  normalize_runs(runs);

  json points = json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    if (!r.report) {
      err << "run " << r.label << " failed: " << r.error << "\n";
      continue;
    }
    const auto& l = r.report->ledger;
    points.push_back({{"policy", r.report->policy},
                      {"value", values[i % values.size()]},
                      {"runtime_ns", r.report->elapsed_ns},
                      {"slow_writes_total", r.report->slow_writes_total},
                      {"block_relocations", l.block_copies},
                      {"page_relocations", l.page_swaps}});
  }
  emit(o, render_runs(o, runs, json{{"param", o.param}, {"points", points}}), out);
  return all_ok(runs) ? 0 : 1;
}

int cmd_gen(const Options& o, std::ostream& out) {
  const SimConfig cfg = build_config(o);
  const auto trace = build_trace(o, cfg);
  std::ostringstream s;
  write_trace(s, trace);
  emit(o, s.str(), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid DRAM/NVM memory management unit simulator"};
  app.require_subcommand(1);
  Options o;

  auto* run = app.add_subcommand("run", "simulate a trace under one or more policies");
  add_common(run, o);
  auto* sweep = app.add_subcommand("sweep", "simulate across values of one config parameter");
  add_common(sweep, o);
  sweep->add_option("--param", o.param, "config key to sweep")->required();
  sweep->add_option("--values", o.values, "comma-separated values")->required();
  auto* gen = app.add_subcommand("gen", "write a synthetic trace");
  add_common(gen, o);

  auto* meta = app.add_subcommand("metacost", "hardware metadata cost estimate");
  MetadataGeometry g;
  std::string space = "2GiB", page = "4KiB", block = "128";
  meta->add_option("--space", space, "memory space");
  meta->add_option("--page", page, "page size");
  meta->add_option("--block", block, "block size");
  meta->add_option("--sets", g.sets, "cache sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*run) return cmd_run(o, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*gen) return cmd_gen(o, out);
    if (*meta) {
      g.space_bytes = parse_size(space);
      g.page_bytes = parse_size(page);
      g.block_bytes = parse_size(block);
      out << format_metadata_cost(metadata_cost(g));
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int main(int argc, char** argv) { return main(argc, argv, std::cout, std::cerr); }

}  // namespace hmmu::cli
