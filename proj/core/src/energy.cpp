#include "sfc/energy.hpp"

#include <algorithm>
#include <cerrno>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <regex>
#include <tuple>

namespace sfc::energy {

namespace fs = std::filesystem;

namespace {

enum class ReadStatus { Ok, Missing, Denied, Malformed };

struct ReadResult {
  ReadStatus status = ReadStatus::Missing;
  std::string text;
};

ReadResult read_first_line(const fs::path& path) {
  errno = 0;
  std::ifstream in(path);
  if (!in) {
    return {errno == EACCES || errno == EPERM ? ReadStatus::Denied : ReadStatus::Missing, {}};
  }
  ReadResult r{ReadStatus::Ok, {}};
  if (!std::getline(in, r.text)) r.status = ReadStatus::Malformed;
  while (!r.text.empty() && std::isspace(static_cast<unsigned char>(r.text.back()))) {
    r.text.pop_back();
  }
  return r;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (errno != 0 || end == s.c_str() || *end != '\0') return false;
  out = v;
  return true;
}

}  // namespace

std::string_view to_string(RaplKind kind) {
  switch (kind) {
    case RaplKind::Package: return "package";
    case RaplKind::PowerPlane0: return "pp0";
    case RaplKind::Dram: return "dram";
  }
  return "?";
}

fs::path powercap_root() {
  if (const char* env = std::getenv(kPowercapRootEnv); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path("/sys/class/powercap");
}

Discovery discover_domains(const fs::path& root) {
  Discovery out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    out.detail = "no powercap tree at " + root.string();
    return out;
  }

  static const std::regex kZone(R"(intel-rapl:(\d+)(?::(\d+))?)");
  bool denied = false;
  std::string denied_path;
  std::vector<RaplDomain> found;

  auto it = fs::directory_iterator(root, ec);
  if (ec) {
    out.status = ec == std::errc::permission_denied ? DiscoveryStatus::PermissionDenied
                                                    : DiscoveryStatus::Absent;
    out.detail = "cannot list " + root.string() + ": " + ec.message();
    return out;
  }
  for (const auto& entry : it) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, kZone)) continue;

    const auto zone_name = read_first_line(entry.path() / "name");
    if (zone_name.status != ReadStatus::Ok) continue;

    RaplDomain d;
    d.dir = entry.path();
    d.socket = static_cast<std::uint32_t>(std::stoul(m[1].str()));
    if (!m[2].matched) {
      if (zone_name.text.rfind("package", 0) != 0) continue;
      d.kind = RaplKind::Package;
      // "package-N" names the socket when present.
      if (auto dash = zone_name.text.find('-'); dash != std::string::npos) {
        std::uint64_t sock = 0;
        if (parse_u64(zone_name.text.substr(dash + 1), sock)) {
          d.socket = static_cast<std::uint32_t>(sock);
        }
      }
    } else if (zone_name.text == "core") {
      d.kind = RaplKind::PowerPlane0;
    } else if (zone_name.text == "dram") {
      d.kind = RaplKind::Dram;
    } else {
      continue;
    }

    const auto range = read_first_line(d.dir / "max_energy_range_uj");
    const auto energy = read_first_line(d.dir / "energy_uj");
    if (range.status == ReadStatus::Denied || energy.status == ReadStatus::Denied) {
      denied = true;
      denied_path = (d.dir / "energy_uj").string();
      continue;
    }
    std::uint64_t range_uj = 0;
    std::uint64_t energy_uj = 0;
    if (range.status != ReadStatus::Ok || energy.status != ReadStatus::Ok ||
        !parse_u64(range.text, range_uj) || !parse_u64(energy.text, energy_uj)) {
      continue;
    }
    d.max_range_j = static_cast<double>(range_uj) / 1e6;
    found.push_back(std::move(d));
  }

  std::sort(found.begin(), found.end(), [](const RaplDomain& a, const RaplDomain& b) {
    return std::tie(a.kind, a.socket) < std::tie(b.kind, b.socket);
  });

  if (!found.empty()) {
    out.status = DiscoveryStatus::Ok;
    out.domains = std::move(found);
  } else if (denied) {
    out.status = DiscoveryStatus::PermissionDenied;
    out.detail = "permission denied reading " + denied_path;
  } else {
    out.detail = "no RAPL zones under " + root.string();
  }
  return out;
}

double read_energy_j(const RaplDomain& domain) {
  const auto r = read_first_line(domain.dir / "energy_uj");
  std::uint64_t uj = 0;
  if (r.status != ReadStatus::Ok || !parse_u64(r.text, uj)) {
    throw EnergyReadError("cannot read " + (domain.dir / "energy_uj").string());
  }
  return static_cast<double>(uj) / 1e6;
}

EnergySampler::EnergySampler(std::vector<RaplDomain> domains, double rate_hz)
    : domains_(std::move(domains)), period_s_(1.0 / rate_hz) {
  if (!(rate_hz >= 1.0 && rate_hz <= 1000.0)) {
    throw std::invalid_argument("sampling rate must be in [1, 1000] Hz");
  }
  series_.domains = domains_;
  series_.samples.resize(domains_.size());
}

EnergySampler::~EnergySampler() {
  if (running_) stop();
}

double EnergySampler::now() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin_).count();
}

void EnergySampler::take_sample() {
  std::lock_guard lock(mu_);
  for (std::size_t i = 0; i < domains_.size(); ++i) {
    double joules = 0.0;
    try {
      joules = read_energy_j(domains_[i]);
    } catch (const EnergyReadError& e) {
      series_.annotations.emplace_back(e.what());
      continue;
    }
    const double t = now();
    auto& s = series_.samples[i];
    // Timestamps stay strictly increasing per domain.
    if (!s.empty() && t <= s.back().t) continue;
    s.push_back(EnergySample{t, joules});
  }
}

void EnergySampler::start() {
  if (running_) throw std::logic_error("sampler already running");
  origin_ = std::chrono::steady_clock::now();
  take_sample();
  running_ = true;
  if (domains_.empty()) return;
  worker_ = std::jthread([this](std::stop_token stop) {
    std::mutex wait_mu;
    std::condition_variable_any cv;
    const auto period = std::chrono::duration<double>(period_s_);
    for (std::uint64_t tick = 1;; ++tick) {
      const auto due = origin_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                     period * static_cast<double>(tick));
      std::unique_lock lock(wait_mu);
      cv.wait_until(lock, stop, due, [] { return false; });
      if (stop.stop_requested()) return;
      lock.unlock();
      take_sample();
    }
  });
}

SampleSeries EnergySampler::stop() {
  if (!running_) throw std::logic_error("sampler not running");
  if (worker_.joinable()) {
    worker_.request_stop();
    worker_.join();
  }
  take_sample();
  running_ = false;
  std::lock_guard lock(mu_);
  series_.wall_seconds = now();
  return series_;
}

SampleSeries sample(const std::function<void()>& workload,
                    const std::vector<RaplDomain>& domains, double rate_hz) {
  EnergySampler sampler(domains, rate_hz);
  sampler.start();
  try {
    workload();
  } catch (...) {
    sampler.stop();
    throw;
  }
  return sampler.stop();
}

std::vector<PowerPoint> power_log(std::span<const EnergySample> samples, double max_range_j) {
  std::vector<PowerPoint> log;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt = samples[i].t - samples[i - 1].t;
    if (dt <= 0.0) continue;
    const double de =
        counter_delta(samples[i - 1].cumulative_j, samples[i].cumulative_j, max_range_j);
    log.push_back(PowerPoint{0.5 * (samples[i].t + samples[i - 1].t), de / dt});
  }
  if (log.empty()) return log;
  const PowerPoint first{samples.front().t, log.front().watts};
  const PowerPoint last{samples.back().t, log.back().watts};
  log.insert(log.begin(), first);
  log.push_back(last);
  return log;
}

double integrate(std::span<const PowerPoint> log) {
  if (log.size() < 2) {
    throw IntegrationError("trapezoidal integral needs at least 2 points, got " +
                           std::to_string(log.size()));
  }
  double joules = 0.0;
  for (std::size_t i = 1; i < log.size(); ++i) {
    joules += 0.5 * (log[i].watts + log[i - 1].watts) * (log[i].t - log[i - 1].t);
  }
  return joules;
}

bool EnergyReport::has(RaplKind kind) const {
  return std::any_of(domains.begin(), domains.end(),
                     [kind](const DomainEnergy& d) { return d.domain.kind == kind; });
}

double EnergyReport::total(RaplKind kind) const {
  double sum = 0.0;
  for (const auto& d : domains) {
    if (d.domain.kind == kind) sum += d.joules;
  }
  return sum;
}

double EnergyReport::total_direct(RaplKind kind) const {
  double sum = 0.0;
  for (const auto& d : domains) {
    if (d.domain.kind == kind) sum += d.joules_direct;
  }
  return sum;
}

EnergyReport make_report(const SampleSeries& series) {
  EnergyReport report;
  report.wall_seconds = series.wall_seconds;
  report.annotations = series.annotations;
  for (std::size_t i = 0; i < series.domains.size(); ++i) {
    const auto& dom = series.domains[i];
    const auto& s = series.samples[i];
    DomainEnergy e;
    e.domain = dom;
    e.samples = s.size();
    for (std::size_t k = 1; k < s.size(); ++k) {
      e.joules_direct += counter_delta(s[k - 1].cumulative_j, s[k].cumulative_j, dom.max_range_j);
    }
    const auto log = power_log(s, dom.max_range_j);
    if (log.size() >= 2) {
      e.joules = integrate(log);
    } else {
      report.annotations.push_back("too few samples to integrate " +
                                   std::string(to_string(dom.kind)) + " socket " +
                                   std::to_string(dom.socket));
    }
    report.domains.push_back(std::move(e));
  }
  return report;
}

void write_samples_csv(std::ostream& out, const SampleSeries& series) {
  out << "t_s,domain,socket,cumulative_j\n";
  char buf[96];
  for (std::size_t i = 0; i < series.domains.size(); ++i) {
    const auto& dom = series.domains[i];
    for (const auto& s : series.samples[i]) {
      std::snprintf(buf, sizeof buf, "%.9g,%s,%u,%.9g\n", s.t,
                    std::string(to_string(dom.kind)).c_str(), dom.socket, s.cumulative_j);
      out << buf;
    }
  }
}

}  // namespace sfc::energy
