#pragma once

// RAPL energy measurement through the Linux powercap tree.
//
// Cumulative counters are sampled at a fixed rate, differentiated into a
// power log and integrated back to joules with the trapezoidal rule. The raw
// counter deltas are summed alongside as a cross-check. Counters tick in
// units of roughly 15.3 uJ on Sandy Bridge; readings are converted from
// microjoules exactly and never rounded to that granularity.
//
// CPU package + DRAM accounts for only part of wall power (about 38% on a
// dual-socket E5-2670 node under full load); these numbers are not a wall meter.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sfc::energy {

enum class RaplKind : std::uint8_t { Package = 0, PowerPlane0 = 1, Dram = 2 };

/// "package", "pp0", "dram".
std::string_view to_string(RaplKind kind);

struct RaplDomain {
  RaplKind kind = RaplKind::Package;
  std::uint32_t socket = 0;
  std::filesystem::path dir;  // powercap zone directory
  double max_range_j = 0.0;   // counter wraps at this value
};

enum class DiscoveryStatus { Ok, Absent, PermissionDenied };

struct Discovery {
  std::vector<RaplDomain> domains;  // empty unless status == Ok
  DiscoveryStatus status = DiscoveryStatus::Absent;
  std::string detail;
};

inline constexpr const char* kPowercapRootEnv = "SFC_POWERCAP_ROOT";

/// $SFC_POWERCAP_ROOT if set, else /sys/class/powercap.
std::filesystem::path powercap_root();

/// Walks intel-rapl:<pkg> and intel-rapl:<pkg>:<sub> zones under `root`.
/// Package zones map to Package, "core" subzones to PowerPlane0 and "dram"
/// subzones to Dram; other zones are ignored. Sorted by (kind, socket).
Discovery discover_domains(const std::filesystem::path& root);
inline Discovery discover_domains() { return discover_domains(powercap_root()); }

class EnergyReadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Current counter value in joules (energy_uj / 1e6).
double read_energy_j(const RaplDomain& domain);

/// Counter increase from `prev` to `next`, assuming at most one wrap.
constexpr double counter_delta(double prev, double next, double max_range) {
  return next >= prev ? next - prev : next + max_range - prev;
}

struct EnergySample {
  double t = 0.0;  // seconds since sampling started, steady clock
  double cumulative_j = 0.0;
};

/// Samples of every domain, in domain order.
struct SampleSeries {
  std::vector<RaplDomain> domains;
  std::vector<std::vector<EnergySample>> samples;  // parallel to domains
  std::vector<std::string> annotations;            // sampler faults
  double wall_seconds = 0.0;
};

inline constexpr double kDefaultRateHz = 10.0;

/// Background sampler. start() records a first sample synchronously; the
/// worker thread then samples every 1/rate seconds until stop(), which joins
/// and records one final sample.
class EnergySampler {
 public:
  EnergySampler(std::vector<RaplDomain> domains, double rate_hz = kDefaultRateHz);
  ~EnergySampler();
  EnergySampler(const EnergySampler&) = delete;
  EnergySampler& operator=(const EnergySampler&) = delete;

  void start();
  SampleSeries stop();

 private:
  void take_sample();
  double now() const;

  std::vector<RaplDomain> domains_;
  double period_s_;
  std::chrono::steady_clock::time_point origin_;
  std::mutex mu_;
  SampleSeries series_;
  std::jthread worker_;
  bool running_ = false;
};

/// Runs `workload` on the calling thread while sampling `domains`.
/// Throws std::invalid_argument unless rate_hz is in [1, 1000].
SampleSeries sample(const std::function<void()>& workload,
                    const std::vector<RaplDomain>& domains,
                    double rate_hz = kDefaultRateHz);

struct PowerPoint {
  double t = 0.0;
  double watts = 0.0;
};

/// Backward differences of consecutive samples, each stamped at its interval
/// midpoint. The first and last interval powers are repeated at the first and
/// last sample times so the log spans the whole run.
std::vector<PowerPoint> power_log(std::span<const EnergySample> samples, double max_range_j);

class IntegrationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Trapezoidal rule over the log. Throws IntegrationError for fewer than 2 points.
double integrate(std::span<const PowerPoint> log);

struct DomainEnergy {
  RaplDomain domain;
  double joules = 0.0;         // trapezoid over the power log
  double joules_direct = 0.0;  // sum of wrap-corrected counter deltas
  std::size_t samples = 0;
};

struct EnergyReport {
  std::vector<DomainEnergy> domains;
  double wall_seconds = 0.0;
  std::vector<std::string> annotations;

  bool has(RaplKind kind) const;
  /// Sum over sockets, trapezoid-integrated.
  double total(RaplKind kind) const;
  double total_direct(RaplKind kind) const;
};

EnergyReport make_report(const SampleSeries& series);

/// CSV with header t_s,domain,socket,cumulative_j; 9 significant digits.
void write_samples_csv(std::ostream& out, const SampleSeries& series);

}  // namespace sfc::energy
