#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <tuple>

#include "bench_cli.hpp"
#include "sfc/energy.hpp"
#include "sfc/matrix.hpp"

namespace sfc::cli {

namespace {

std::string read_sysfs_line(const char* path) {
  std::ifstream in(path);
  std::string line;
  if (in) std::getline(in, line);
  while (!line.empty() && (line.back() == '\n' || line.back() == ' ')) line.pop_back();
  return line;
}

struct FrequencySnapshot {
  std::string governor;
  std::optional<std::uint64_t> khz;
};

FrequencySnapshot snapshot_frequency() {
  FrequencySnapshot s;
  s.governor = read_sysfs_line("/sys/devices/system/cpu/cpu0/cpufreq/scaling_governor");
  const std::string khz = read_sysfs_line("/sys/devices/system/cpu/cpu0/cpufreq/scaling_cur_freq");
  if (!khz.empty()) {
    try {
      s.khz = std::stoull(khz);
    } catch (const std::exception&) {
    }
  }
  return s;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::optional<double> median_of(const std::vector<ResultRow>& rows,
                                std::optional<double> ResultRow::*field) {
  std::vector<double> vals;
  for (const auto& r : rows) {
    if (r.*field) vals.push_back(*(r.*field));
  }
  if (vals.empty()) return std::nullopt;
  return median(std::move(vals));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_optional_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (sizes.empty()) throw UsageError("no sizes given");
  for (unsigned n : sizes) {
    if (n < CurveOrder::kMinBits || n > 13) {
      throw UsageError("size " + std::to_string(n) + " outside [1, 13]");
    }
  }
  if (layouts.empty()) throw UsageError("no layouts given");
  if (workers.empty()) throw UsageError("no worker counts given");
  for (unsigned w : workers) {
    if (w == 0) throw UsageError("worker counts must be >= 1");
  }
  if (repetitions == 0) throw UsageError("repetitions must be >= 1");
  if (!(rate_hz >= 1.0 && rate_hz <= 1000.0)) {
    throw UsageError("sampling rate must be in [1, 1000] Hz");
  }
}

void apply_config_json(ExperimentConfig& cfg, const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  try {
    if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<unsigned>>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<std::vector<unsigned>>();
    if (j.contains("layouts")) {
      cfg.layouts.clear();
      for (const auto& name : j["layouts"].get<std::vector<std::string>>()) {
        auto kind = parse_layout(name);
        if (!kind) throw UsageError("config: unknown layout " + name);
        cfg.layouts.push_back(*kind);
      }
    }
    if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<unsigned>();
    if (j.contains("warmup")) cfg.warmup = j["warmup"].get<unsigned>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("energy")) cfg.energy = j["energy"].get<bool>();
    if (j.contains("require_energy")) cfg.require_energy = j["require_energy"].get<bool>();
    if (j.contains("rate_hz")) cfg.rate_hz = j["rate_hz"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

std::uint64_t input_seed(std::uint64_t seed, unsigned n, unsigned operand) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (1 + (std::uint64_t{n} << 1 | operand));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BenchResult run_bench(const ExperimentConfig& cfg, std::ostream& log,
                      std::ostream* samples_csv) {
  cfg.validate();
  BenchResult result;

  std::vector<energy::RaplDomain> domains;
  if (cfg.energy || cfg.require_energy) {
    auto found = energy::discover_domains();
    if (found.status == energy::DiscoveryStatus::Ok) {
      domains = std::move(found.domains);
      result.energy_measured = true;
    } else {
      const std::string why =
          found.status == energy::DiscoveryStatus::PermissionDenied
              ? "RAPL counters present but not readable (" + found.detail + ")"
              : "RAPL counters unavailable (" + found.detail + ")";
      if (cfg.require_energy) throw EnergyUnavailable(why);
      result.warnings.push_back(why + "; running in time-only mode");
      log << "warning: " << result.warnings.back() << '\n';
    }
  }
  if (samples_csv != nullptr) *samples_csv << "layout,n,workers,rep,t_s,domain,socket,cumulative_j\n";

  for (LayoutKind layout : cfg.layouts) {
    for (unsigned n : cfg.sizes) {
      const CurveOrder order(n);
      const MatrixF64 a = random_matrix(order, layout, input_seed(cfg.seed, n, 0));
      const MatrixF64 b = random_matrix(order, layout, input_seed(cfg.seed, n, 1));
      for (unsigned w : cfg.workers) {
        for (unsigned i = 0; i < cfg.warmup; ++i) (void)matmul(a, b, w);
        for (unsigned rep = 0; rep < cfg.repetitions; ++rep) {
          ResultRow row;
          row.layout = layout;
          row.n = n;
          row.workers = w;
          row.rep = rep;
          row.seed = cfg.seed;
          const FrequencySnapshot freq = snapshot_frequency();
          row.governor = freq.governor;
          row.freq_khz = freq.khz;

          std::optional<MatrixF64> c;
          auto work = [&] {
            const auto t0 = std::chrono::steady_clock::now();
            c.emplace(matmul(a, b, w));
            row.wall_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          };
          if (result.energy_measured) {
            const auto series = energy::sample(work, domains, cfg.rate_hz);
            const auto report = energy::make_report(series);
            for (const auto& note : report.annotations) {
              result.warnings.push_back(note);
              log << "warning: " << note << '\n';
            }
            if (report.has(energy::RaplKind::Package)) row.pkg_j = report.total(energy::RaplKind::Package);
            if (report.has(energy::RaplKind::PowerPlane0)) row.pp0_j = report.total(energy::RaplKind::PowerPlane0);
            if (report.has(energy::RaplKind::Dram)) row.dram_j = report.total(energy::RaplKind::Dram);
            if (samples_csv != nullptr) {
              std::ostringstream body;
              energy::write_samples_csv(body, series);
              std::istringstream lines(body.str());
              std::string line;
              std::getline(lines, line);  // header
              while (std::getline(lines, line)) {
                *samples_csv << short_name(layout) << ',' << n << ',' << w << ',' << rep << ','
                             << line << '\n';
              }
            }
          } else {
            work();
          }
          row.checksum = checksum(*c);
          if (cfg.no_timing) {
            row.wall_s = 0.0;
            if (row.pkg_j) row.pkg_j = 0.0;
            if (row.pp0_j) row.pp0_j = 0.0;
            if (row.dram_j) row.dram_j = 0.0;
            if (row.freq_khz) row.freq_khz = 0;
          }
          log << short_name(layout) << " n=" << n << " workers=" << w << " rep=" << rep
              << " wall_s=" << format_double(row.wall_s) << '\n';
          result.rows.push_back(std::move(row));
        }
      }
    }
  }

  // Median summaries, one per (layout, n, workers), in measurement order.
  std::vector<ResultRow> summaries;
  for (std::size_t i = 0; i < result.rows.size();) {
    std::size_t j = i;
    std::vector<ResultRow> group;
    while (j < result.rows.size() && result.rows[j].layout == result.rows[i].layout &&
           result.rows[j].n == result.rows[i].n && result.rows[j].workers == result.rows[i].workers) {
      group.push_back(result.rows[j]);
      ++j;
    }
    ResultRow s = group.front();
    s.rep.reset();
    std::vector<double> walls;
    for (const auto& r : group) walls.push_back(r.wall_s);
    s.wall_s = median(walls);
    s.pkg_j = median_of(group, &ResultRow::pkg_j);
    s.pp0_j = median_of(group, &ResultRow::pp0_j);
    s.dram_j = median_of(group, &ResultRow::dram_j);
    summaries.push_back(std::move(s));
    i = j;
  }
  result.rows.insert(result.rows.end(), summaries.begin(), summaries.end());
  return result;
}

void write_bench_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : rows) {
    char sum[24];
    std::snprintf(sum, sizeof sum, "0x%016" PRIx64, r.checksum);
    out << short_name(r.layout) << ',' << r.n << ',' << r.workers << ','
        << (r.rep ? std::to_string(*r.rep) : std::string("median")) << ',' << r.seed << ','
        << format_double(r.wall_s) << ',' << format_optional(r.pkg_j) << ','
        << format_optional(r.pp0_j) << ',' << format_optional(r.dram_j) << ',' << sum << ','
        << r.governor << ',' << (r.freq_khz ? std::to_string(*r.freq_khz) : std::string{})
        << '\n';
  }
}

std::vector<ResultRow> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("bench CSV is empty");
  if (line != kBenchCsvHeader) throw std::runtime_error("unexpected bench CSV header: " + line);
  std::vector<ResultRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 12) {
      throw std::runtime_error("bench CSV line " + std::to_string(lineno) + ": expected 12 columns");
    }
    try {
      ResultRow r;
      auto layout = parse_layout(cells[0]);
      if (!layout) throw std::runtime_error("unknown layout " + cells[0]);
      r.layout = *layout;
      r.n = static_cast<unsigned>(std::stoul(cells[1]));
      r.workers = static_cast<unsigned>(std::stoul(cells[2]));
      if (cells[3] != "median") r.rep = static_cast<unsigned>(std::stoul(cells[3]));
      r.seed = std::stoull(cells[4]);
      r.wall_s = std::stod(cells[5]);
      r.pkg_j = parse_optional_double(cells[6]);
      r.pp0_j = parse_optional_double(cells[7]);
      r.dram_j = parse_optional_double(cells[8]);
      r.checksum = std::stoull(cells[9], nullptr, 16);
      r.governor = cells[10];
      if (!cells[11].empty()) r.freq_khz = std::stoull(cells[11]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw std::runtime_error("bench CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<SpeedupRow> compute_speedup(const std::vector<ResultRow>& rows) {
  const bool have_summaries =
      std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.is_summary(); });
  using Key = std::tuple<LayoutKind, unsigned, unsigned>;
  std::map<Key, std::vector<double>> walls;
  for (const auto& r : rows) {
    if (r.is_summary() != have_summaries) continue;
    walls[{r.layout, r.n, r.workers}].push_back(r.wall_s);
  }
  std::vector<SpeedupRow> out;
  for (const auto& [key, samples] : walls) {
    const auto [layout, n, w] = key;
    auto base = walls.find({layout, n, 1U});
    if (base == walls.end()) {
      throw std::runtime_error("no workers=1 baseline for " + std::string(short_name(layout)) +
                               " n=" + std::to_string(n));
    }
    const double base_wall = median(base->second);
    if (!(base_wall > 0.0)) {
      throw std::runtime_error("zero workers=1 baseline for " + std::string(short_name(layout)) +
                               " n=" + std::to_string(n));
    }
    const double wall = median(samples);
    out.push_back(SpeedupRow{layout, n, w, wall, wall > 0.0 ? base_wall / wall : 0.0});
  }
  return out;
}

void write_speedup_csv(std::ostream& out, const std::vector<SpeedupRow>& rows) {
  out << "layout,n,workers,median_wall_s,speedup\n";
  for (const auto& r : rows) {
    out << short_name(r.layout) << ',' << r.n << ',' << r.workers << ','
        << format_double(r.median_wall_s) << ',' << format_double(r.speedup) << '\n';
  }
}

}  // namespace sfc::cli
