#include <CLI11.hpp>
#include <bitset>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bench_cli.hpp"
#include "sfc/cachesim.hpp"
#include "sfc/trace.hpp"

namespace sfc::cli {

namespace {

// Cachegrind HO vs MO last-level read misses at n=12 on a 20 MiB L3, printed
// as a reference point next to the simulated ratio.
constexpr double kReferenceHoMisses = 16.78e6;
constexpr double kReferenceMoMisses = 17.06e6;

LayoutKind layout_arg(const std::string& text) {
  auto kind = parse_layout(text);
  if (!kind) throw UsageError("unknown layout '" + text + "'");
  return *kind;
}

std::vector<LayoutKind> layout_list(const std::vector<std::string>& names) {
  std::vector<LayoutKind> out;
  for (const auto& n : names) out.push_back(layout_arg(n));
  if (out.empty()) throw UsageError("no layouts given");
  return out;
}

CurveOrder order_arg(unsigned n) {
  if (n < CurveOrder::kMinBits || n > CurveOrder::kMaxBits) {
    throw UsageError("--n must be in [1, 31]");
  }
  return CurveOrder(n);
}

// "all", "middle:K" or "BEGIN:END" (half-open).
RowRange rows_arg(const std::string& spec, CurveOrder order) {
  if (spec == "all") return all_rows(order);
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw UsageError("bad --rows '" + spec + "'");
  const std::string head = spec.substr(0, colon);
  const std::string tail = spec.substr(colon + 1);
  try {
    if (head == "middle") {
      return middle_rows(order, static_cast<std::uint32_t>(std::stoul(tail)));
    }
    RowRange r{static_cast<std::uint32_t>(std::stoul(head)),
               static_cast<std::uint32_t>(std::stoul(tail))};
    if (r.begin > r.end || r.end > order.side()) {
      throw UsageError("--rows " + spec + " outside [0, " + std::to_string(order.side()) + ")");
    }
    return r;
  } catch (const std::logic_error&) {
    throw UsageError("bad --rows '" + spec + "'");
  }
}

std::string binary(std::uint64_t v, unsigned digits) {
  std::string s = std::bitset<64>(v).to_string();
  return s.substr(64 - digits);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<ResultRow> load_bench_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_bench_csv(in);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path);
}

struct CodecArgs {
  std::string layout;
  unsigned n = 0;
  std::uint32_t y = 0;
  std::uint32_t x = 0;
  std::uint64_t index = 0;
};

struct BenchArgs {
  std::vector<unsigned> sizes;
  std::vector<std::string> layouts;
  std::vector<unsigned> workers;
  unsigned reps = 0;
  unsigned warmup = 0;
  std::uint64_t seed = 0;
  double rate_hz = 0.0;
  std::string out;
  std::string samples_out;
  std::string config;
};

struct SimArgs {
  unsigned n = 0;
  std::vector<std::string> layouts = {"rowmajor", "morton", "hilbert"};
  std::string hierarchy;
  std::string rows = "all";
  std::string layout = "rowmajor";
  std::string out;
  bool desk_scale = false;
  bool c_per_k = false;
};

void run_codec(const CodecArgs& a, bool have_index, bool have_y, bool have_x, std::ostream& out) {
  const LayoutKind kind = layout_arg(a.layout);
  const CurveOrder order = order_arg(a.n);
  if (have_index) {
    if (have_y || have_x) throw UsageError("give either --index or --y/--x, not both");
    if (a.index >= order.cells()) {
      throw UsageError("--index must be below " + std::to_string(order.cells()));
    }
    const Coord2 c = decode(kind, LinearIndex{a.index}, order);
    out << '(' << c.y << ',' << c.x << ") y=0b" << binary(c.y, order.bits()) << " x=0b"
        << binary(c.x, order.bits()) << '\n';
    return;
  }
  if (!have_y || !have_x) throw UsageError("codec needs --y and --x, or --index");
  if (a.y >= order.side() || a.x >= order.side()) {
    throw UsageError("--y/--x must be below " + std::to_string(order.side()));
  }
  const LinearIndex i = encode(kind, Coord2{a.y, a.x}, order);
  out << i.value << " 0b" << binary(i.value, 2 * order.bits()) << '\n';
}

void print_sim_table(const std::vector<LayoutSimResult>& results, std::ostream& out) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-6s %-5s %14s %14s %14s %14s %14s\n", "layout", "level",
                "reads", "read_misses", "writes", "write_misses", "misses");
  out << buf;
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.stats.levels.size(); ++i) {
      const auto& l = r.stats.levels[i];
      std::snprintf(buf, sizeof buf, "%-6s L%-4zu %14llu %14llu %14llu %14llu %14llu\n",
                    std::string(short_name(r.layout)).c_str(), i + 1,
                    static_cast<unsigned long long>(l.read_accesses),
                    static_cast<unsigned long long>(l.read_misses),
                    static_cast<unsigned long long>(l.write_accesses),
                    static_cast<unsigned long long>(l.write_misses),
                    static_cast<unsigned long long>(l.misses()));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-6s compulsory_ll_misses %llu trace_records %llu\n",
                  std::string(short_name(r.layout)).c_str(),
                  static_cast<unsigned long long>(r.compulsory_misses),
                  static_cast<unsigned long long>(r.trace_records));
    out << buf;
  }
  const LayoutSimResult* ho = nullptr;
  const LayoutSimResult* mo = nullptr;
  for (const auto& r : results) {
    if (r.layout == LayoutKind::Hilbert) ho = &r;
    if (r.layout == LayoutKind::Morton) mo = &r;
  }
  if (ho != nullptr && mo != nullptr) {
    const auto ho_m = ho->stats.last_level().read_misses;
    const auto mo_m = mo->stats.last_level().read_misses;
    if (mo_m > 0) {
      std::snprintf(buf, sizeof buf, "ho_mo_ll_read_miss_ratio %.4f\n",
                    static_cast<double>(ho_m) / static_cast<double>(mo_m));
    } else {
      std::snprintf(buf, sizeof buf, "ho_mo_ll_read_miss_ratio n/a\n");
    }
    out << buf;
    std::snprintf(buf, sizeof buf, "reference_ratio %.4f (16.78e6 / 17.06e6, n=12, 20 MiB L3)\n",
                  kReferenceHoMisses / kReferenceMoMisses);
    out << buf;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Space-filling-curve matrix layouts: codec, matmul benchmarks, cache simulation"};
  app.require_subcommand(1);

  CodecArgs codec_args;
  auto* codec = app.add_subcommand("codec", "Translate coordinates to an index or back");
  codec->add_option("--layout", codec_args.layout, "rowmajor | morton | hilbert")->required();
  codec->add_option("--n", codec_args.n, "Bits per dimension (side = 2^n)")->required();
  auto* opt_y = codec->add_option("--y", codec_args.y, "Row coordinate");
  auto* opt_x = codec->add_option("--x", codec_args.x, "Column coordinate");
  auto* opt_index = codec->add_option("--index", codec_args.index, "Linear index to decode");

  BenchArgs bench_args;
  ExperimentConfig bench_cfg;
  auto* bench = app.add_subcommand("bench", "Time matmul over the experiment grid, write CSV");
  auto* opt_sizes = bench->add_option("--sizes", bench_args.sizes, "Curve orders, e.g. 6,8,10")
                        ->delimiter(',');
  auto* opt_layouts =
      bench->add_option("--layouts", bench_args.layouts, "Subset of rowmajor,morton,hilbert")
          ->delimiter(',');
  auto* opt_workers = bench->add_option("--workers", bench_args.workers, "Worker counts, e.g. 1,2,4,8")
                          ->delimiter(',');
  auto* opt_reps = bench->add_option("--reps", bench_args.reps, "Repetitions per point");
  auto* opt_warmup = bench->add_option("--warmup", bench_args.warmup, "Unrecorded warm-up runs");
  auto* opt_seed = bench->add_option("--seed", bench_args.seed, "Input matrix seed");
  auto* opt_rate = bench->add_option("--rate-hz", bench_args.rate_hz, "Energy sampling rate");
  auto* opt_energy = bench->add_flag("--energy", "Sample RAPL counters during each run");
  auto* opt_require = bench->add_flag("--require-energy", "Exit 3 if RAPL counters are unavailable");
  bench->add_flag("--no-timing", bench_cfg.no_timing, "Zero measured columns (reproducible CSV)");
  bench->add_option("--out", bench_args.out, "CSV output path (default stdout)");
  bench->add_option("--samples-out", bench_args.samples_out, "Raw energy sample CSV path");
  bench->add_option("--config", bench_args.config, "JSON config; flags override it");

  std::string speedup_in;
  std::string speedup_out;
  auto* speedup = app.add_subcommand("speedup", "Parallel speedup table from a bench CSV");
  speedup->add_option("--in", speedup_in, "Bench CSV")->required();
  speedup->add_option("--out", speedup_out, "Output CSV (default stdout)");

  std::string et_in;
  std::string et_prefix;
  auto* energy_time = app.add_subcommand("energy-time", "Energy-vs-time dataset and gnuplot script");
  energy_time->add_option("--in", et_in, "Bench CSV with energy columns")->required();
  energy_time->add_option("--out-prefix", et_prefix, "Writes PREFIX.dat and PREFIX.gp")->required();

  SimArgs sim;
  auto* simcache = app.add_subcommand("simcache", "Simulate matmul traces through a cache hierarchy");
  simcache->add_option("--n", sim.n, "Bits per dimension")->required();
  simcache->add_option("--layouts", sim.layouts, "Layouts to compare")->delimiter(',');
  auto* opt_hier = simcache->add_option("--hierarchy", sim.hierarchy, "Hierarchy JSON file");
  simcache->add_flag("--desk-scale", sim.desk_scale, "Use the 256 KiB last-level hierarchy")
      ->excludes(opt_hier);
  simcache->add_option("--rows", sim.rows, "all | middle:K | BEGIN:END");
  simcache->add_flag("--c-per-k", sim.c_per_k, "One C access per k step instead of per (i,j)");

  SimArgs dump;
  auto* trace_dump = app.add_subcommand("trace-dump", "Write a matmul trace as 9-byte records");
  trace_dump->add_option("--n", dump.n, "Bits per dimension")->required();
  trace_dump->add_option("--layout", dump.layout, "rowmajor | morton | hilbert");
  trace_dump->add_option("--rows", dump.rows, "all | middle:K | BEGIN:END");
  trace_dump->add_option("--out", dump.out, "Output file")->required();
  trace_dump->add_flag("--c-per-k", dump.c_per_k, "One C access per k step instead of per (i,j)");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*codec) {
      run_codec(codec_args, opt_index->count() > 0, opt_y->count() > 0, opt_x->count() > 0, out);
    } else if (*bench) {
      if (!bench_args.config.empty()) apply_config_json(bench_cfg, slurp(bench_args.config));
      if (opt_sizes->count() > 0) bench_cfg.sizes = bench_args.sizes;
      if (opt_layouts->count() > 0) bench_cfg.layouts = layout_list(bench_args.layouts);
      if (opt_workers->count() > 0) bench_cfg.workers = bench_args.workers;
      if (opt_reps->count() > 0) bench_cfg.repetitions = bench_args.reps;
      if (opt_warmup->count() > 0) bench_cfg.warmup = bench_args.warmup;
      if (opt_seed->count() > 0) bench_cfg.seed = bench_args.seed;
      if (opt_rate->count() > 0) bench_cfg.rate_hz = bench_args.rate_hz;
      if (opt_energy->count() > 0) bench_cfg.energy = true;
      if (opt_require->count() > 0) bench_cfg.require_energy = true;
      bench_cfg.validate();

      std::ofstream samples_file;
      if (!bench_args.samples_out.empty()) {
        samples_file.open(bench_args.samples_out);
        if (!samples_file) throw std::runtime_error("cannot write " + bench_args.samples_out);
      }
      const BenchResult result =
          run_bench(bench_cfg, err, samples_file.is_open() ? &samples_file : nullptr);
      std::ostringstream csv;
      write_bench_csv(csv, result.rows);
      if (bench_args.out.empty()) {
        out << csv.str();
      } else {
        write_file(bench_args.out, csv.str());
      }
    } else if (*speedup) {
      std::ostringstream csv;
      write_speedup_csv(csv, compute_speedup(load_bench_csv(speedup_in)));
      if (speedup_out.empty()) {
        out << csv.str();
      } else {
        write_file(speedup_out, csv.str());
      }
    } else if (*energy_time) {
      const auto series = energy_time_series(load_bench_csv(et_in));
      const std::string data_file = et_prefix + ".dat";
      const std::string script_file = et_prefix + ".gp";
      const std::string data = energy_time_data(series);
      const std::string script = energy_time_gnuplot(series, data_file, et_prefix + ".png");
      write_file(data_file, data);
      write_file(script_file, script);
      out << "wrote " << series.size() << " series to " << data_file << " and " << script_file
          << '\n';
    } else if (*simcache) {
      const CurveOrder order = order_arg(sim.n);
      HierarchyConfig cfg = sim.desk_scale ? HierarchyConfig::desk_scale()
                                           : HierarchyConfig::sandy_bridge_ep();
      if (!sim.hierarchy.empty()) cfg = load_hierarchy(sim.hierarchy);
      const auto layouts = layout_list(sim.layouts);
      const RowRange rows = rows_arg(sim.rows, order);
      TraceOptions opts;
      opts.c_in_register = !sim.c_per_k;
      print_sim_table(compare_layouts(order, cfg, rows, opts, layouts), out);
    } else if (*trace_dump) {
      const CurveOrder order = order_arg(dump.n);
      const LayoutKind layout = layout_arg(dump.layout);
      const RowRange rows = rows_arg(dump.rows, order);
      TraceOptions opts;
      opts.c_in_register = !dump.c_per_k;
      std::ofstream file(dump.out, std::ios::binary);
      if (!file) throw std::runtime_error("cannot write " + dump.out);
      TraceWriter writer(file);
      matmul_trace(order, layout, rows, opts, [&writer](AccessRecord r) { writer(r); });
      if (!file) throw std::runtime_error("failed writing " + dump.out);
      out << writer.records() << " records written to " << dump.out << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const EnergyUnavailable& e) {
    err << "error: " << e.what() << '\n';
    return kExitEnergyUnavailable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace sfc::cli
