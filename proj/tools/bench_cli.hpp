#pragma once

// Experiment driver behind the sfc-bench command line tool.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfc/codec.hpp"

namespace sfc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitRuntime = 2,
  kExitEnergyUnavailable = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnergyUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::vector<unsigned> sizes = {6, 8, 10};
  std::vector<LayoutKind> layouts = {kAllLayouts.begin(), kAllLayouts.end()};
  std::vector<unsigned> workers = {1, 2, 4, 8};
  unsigned repetitions = 3;
  unsigned warmup = 1;
  std::uint64_t seed = 42;
  bool energy = false;
  bool require_energy = false;
  double rate_hz = 10.0;
  // Zero every measured column (time, energy, frequency) for reproducible output.
  bool no_timing = false;

  /// Throws UsageError.
  void validate() const;
};

/// Applies keys present in a JSON object on top of `cfg`.
void apply_config_json(ExperimentConfig& cfg, const std::string& text);

inline constexpr const char* kBenchCsvHeader =
    "layout,n,workers,rep,seed,wall_s,pkg_j,pp0_j,dram_j,checksum,governor,freq_khz";

struct ResultRow {
  LayoutKind layout = LayoutKind::RowMajor;
  unsigned n = 0;
  unsigned workers = 1;
  std::optional<unsigned> rep;  // nullopt marks a median summary row
  std::uint64_t seed = 0;
  double wall_s = 0.0;
  std::optional<double> pkg_j;
  std::optional<double> pp0_j;
  std::optional<double> dram_j;
  std::uint64_t checksum = 0;
  std::string governor;
  std::optional<std::uint64_t> freq_khz;

  bool is_summary() const { return !rep.has_value(); }
};

struct BenchResult {
  std::vector<ResultRow> rows;  // measurements first, then medians
  std::vector<std::string> warnings;
  bool energy_measured = false;
};

/// Runs the grid in (layout, n, workers, repetition) order. Inputs are the
/// same for every layout: A and B depend only on (seed, n).
/// Throws EnergyUnavailable when cfg.require_energy and no RAPL domain is usable.
BenchResult run_bench(const ExperimentConfig& cfg, std::ostream& log,
                      std::ostream* samples_csv = nullptr);

void write_bench_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_bench_csv(std::istream& in);

std::uint64_t input_seed(std::uint64_t seed, unsigned n, unsigned operand);

struct SpeedupRow {
  LayoutKind layout = LayoutKind::RowMajor;
  unsigned n = 0;
  unsigned workers = 1;
  double median_wall_s = 0.0;
  double speedup = 0.0;
};

/// speedup(layout, n, w) = median wall(1) / median wall(w). Uses summary rows
/// when the input has them, else medians of the measurement rows. Throws
/// std::runtime_error when a (layout, n) series lacks a workers=1 baseline.
std::vector<SpeedupRow> compute_speedup(const std::vector<ResultRow>& rows);
void write_speedup_csv(std::ostream& out, const std::vector<SpeedupRow>& rows);

struct EnergyTimeSeries {
  LayoutKind layout = LayoutKind::RowMajor;
  std::string domain;  // "package", "pp0", "dram"
  std::vector<std::pair<double, double>> points;  // (wall_seconds, joules)
};

/// One series per (layout, domain) with data. Throws std::runtime_error when
/// the input carries no energy columns at all.
std::vector<EnergyTimeSeries> energy_time_series(const std::vector<ResultRow>& rows);
std::string energy_time_data(const std::vector<EnergyTimeSeries>& series);
std::string energy_time_gnuplot(const std::vector<EnergyTimeSeries>& series,
                                const std::string& data_file, const std::string& image_file);

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfc::cli
