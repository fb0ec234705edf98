#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "sfc/energy.hpp"
#include "support/powercap_fixture.hpp"

using namespace sfc::energy;
using namespace std::chrono_literals;

namespace {

constexpr std::uint64_t kRange = 262143328850;  // typical package max_energy_range_uj

std::vector<PowerPoint> sampled(double t0, double t1, std::size_t points, double (*f)(double)) {
  std::vector<PowerPoint> out;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(points - 1);
    out.push_back({t, f(t)});
  }
  return out;
}

}  // namespace

TEST(CounterDelta, Cases) {
  EXPECT_EQ(counter_delta(10, 30, 1000), 20.0);
  EXPECT_EQ(counter_delta(990, 10, 1000), 20.0);
  EXPECT_EQ(counter_delta(123.5, 123.5, 1000), 0.0);
  static_assert(counter_delta(990, 10, 1000) == 20.0);
}

TEST(Integrate, ConstantTenWatts) {
  const auto log = sampled(0.0, 1.0, 11, [](double) { return 10.0; });
  EXPECT_EQ(integrate(log), 10.0);
}

TEST(Integrate, LinearRamp) {
  EXPECT_EQ(integrate(std::vector<PowerPoint>{{0.0, 0.0}, {1.0, 10.0}}), 5.0);
  const auto log = sampled(0.0, 1.0, 5, [](double t) { return 10.0 * t; });
  EXPECT_EQ(integrate(log), 5.0);
}

TEST(Integrate, Sinusoid) {
  const auto log = sampled(0.0, 1.0, 1000,
                           [](double t) { return 5.0 + 5.0 * std::sin(2 * std::numbers::pi * t); });
  EXPECT_NEAR(integrate(log), 5.0, 5.0 * 1e-4);
}

TEST(Integrate, NeedsTwoPoints) {
  EXPECT_THROW(integrate(std::vector<PowerPoint>{}), IntegrationError);
  EXPECT_THROW(integrate(std::vector<PowerPoint>{{0.0, 1.0}}), IntegrationError);
  EXPECT_THROW(integrate(std::vector<PowerPoint>{{0.0, 1.0}}), std::invalid_argument);
}

TEST(PowerLog, ReintegratesToCounterDelta) {
  // 25 W, uneven sampling, one wrap.
  std::vector<EnergySample> s;
  const double range = 100.0;
  double e = 80.0;
  double t = 0.0;
  for (double dt : {0.1, 0.13, 0.07, 0.1, 0.11}) {
    s.push_back({t, std::fmod(e, range)});
    t += dt;
    e += 25.0 * dt;
  }
  s.push_back({t, std::fmod(e, range)});
  const auto log = power_log(s, range);
  ASSERT_EQ(log.size(), s.size() + 1);
  EXPECT_EQ(log.front().t, s.front().t);
  EXPECT_EQ(log.back().t, s.back().t);
  for (const auto& p : log) EXPECT_NEAR(p.watts, 25.0, 1e-9);
  EXPECT_NEAR(integrate(log), 25.0 * t, 1e-9);
}

TEST(PowerLog, TooFewSamples) {
  EXPECT_TRUE(power_log(std::vector<EnergySample>{{0.0, 1.0}}, 10.0).empty());
}

TEST(Discovery, PackageAndDram) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 1000, kRange);
  fixture::add_zone(root.path(), "intel-rapl:0:1", "dram", 2000, kRange);
  fixture::add_zone(root.path(), "intel-rapl:0:2", "uncore", 2000, kRange);
  fixture::write_text(root / "README", "not a zone");
  const Discovery d = discover_domains(root.path());
  ASSERT_EQ(d.status, DiscoveryStatus::Ok);
  ASSERT_EQ(d.domains.size(), 2U);
  EXPECT_EQ(d.domains[0].kind, RaplKind::Package);
  EXPECT_EQ(d.domains[1].kind, RaplKind::Dram);
  EXPECT_DOUBLE_EQ(d.domains[0].max_range_j, kRange / 1e6);
  EXPECT_DOUBLE_EQ(read_energy_j(d.domains[1]), 0.002);
}

TEST(Discovery, DualSocket) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:1", "package-1", 5, kRange);
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 5, kRange);
  fixture::add_zone(root.path(), "intel-rapl:0:0", "core", 5, kRange);
  fixture::add_zone(root.path(), "intel-rapl:1:0", "core", 5, kRange);
  const Discovery d = discover_domains(root.path());
  ASSERT_EQ(d.domains.size(), 4U);
  EXPECT_EQ(d.domains[0].kind, RaplKind::Package);
  EXPECT_EQ(d.domains[0].socket, 0U);
  EXPECT_EQ(d.domains[1].kind, RaplKind::Package);
  EXPECT_EQ(d.domains[1].socket, 1U);
  EXPECT_EQ(d.domains[2].kind, RaplKind::PowerPlane0);
}

TEST(Discovery, AbsentTree) {
  const Discovery d = discover_domains("/nonexistent/powercap");
  EXPECT_EQ(d.status, DiscoveryStatus::Absent);
  EXPECT_TRUE(d.domains.empty());
  fixture::TempDir empty;
  EXPECT_EQ(discover_domains(empty.path()).status, DiscoveryStatus::Absent);
}

TEST(Discovery, MalformedCounterSkipped) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 5, kRange);
  fixture::write_text(root / "intel-rapl:0" / "energy_uj", "garbage\n");
  EXPECT_TRUE(discover_domains(root.path()).domains.empty());
}

TEST(Discovery, EnvironmentOverride) {
  fixture::TempDir root;
  fixture::ScopedEnv env(kPowercapRootEnv, root.path().string());
  EXPECT_EQ(powercap_root(), root.path());
}

TEST(Sampler, TwoSecondsAtTenHertz) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 0, kRange);
  const auto domains = discover_domains(root.path()).domains;
  const auto series = sample([] { std::this_thread::sleep_for(2s); }, domains, 10.0);
  ASSERT_EQ(series.samples.size(), 1U);
  EXPECT_GE(series.samples[0].size(), 20U);
  EXPECT_LE(series.samples[0].size(), 23U);
  EXPECT_GE(series.wall_seconds, 2.0);
  for (std::size_t i = 1; i < series.samples[0].size(); ++i) {
    EXPECT_GT(series.samples[0][i].t, series.samples[0][i - 1].t);
  }
}

TEST(Sampler, ZeroLengthWorkload) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 0, kRange);
  fixture::add_zone(root.path(), "intel-rapl:0:1", "dram", 0, kRange);
  const auto series = sample([] {}, discover_domains(root.path()).domains);
  for (const auto& s : series.samples) EXPECT_GE(s.size(), 2U);
}

TEST(Sampler, TimeOnlyMode) {
  const auto series = sample([] { std::this_thread::sleep_for(50ms); }, {});
  EXPECT_TRUE(series.samples.empty());
  EXPECT_GE(series.wall_seconds, 0.05);
  EXPECT_TRUE(make_report(series).domains.empty());
}

TEST(Sampler, RateBounds) {
  EXPECT_THROW(sample([] {}, {}, 0.5), std::invalid_argument);
  EXPECT_THROW(sample([] {}, {}, 1001.0), std::invalid_argument);
}

TEST(Sampler, WorkloadExceptionPropagates) {
  EXPECT_THROW(sample([] { throw std::runtime_error("boom"); }, {}), std::runtime_error);
}

TEST(Sampler, ReadFailureIsAnnotated) {
  fixture::TempDir root;
  fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 0, kRange);
  const auto domains = discover_domains(root.path()).domains;
  const auto series = sample(
      [&] {
        std::this_thread::sleep_for(150ms);
        std::filesystem::remove(root / "intel-rapl:0" / "energy_uj");
        std::this_thread::sleep_for(150ms);
      },
      domains, 20.0);
  EXPECT_FALSE(series.annotations.empty());
  EXPECT_GE(series.samples[0].size(), 2U);
}

TEST(Report, TrapezoidAgreesWithCounterDeltas) {
  fixture::TempDir root;
  const auto pkg = fixture::add_zone(root.path(), "intel-rapl:0", "package-0", 0, 30'000'000);
  const auto dram = fixture::add_zone(root.path(), "intel-rapl:0:1", "dram", 0, kRange);
  const auto domains = discover_domains(root.path()).domains;
  EnergyReport report;
  {
    // 40 W wraps the 30 J package counter during the run.
    fixture::CounterDriver driver({{pkg, 40.0, 0, 30'000'000}, {dram, 6.0, 0, kRange}});
    report = make_report(sample([] { std::this_thread::sleep_for(1200ms); }, domains, 20.0));
  }
  ASSERT_TRUE(report.has(RaplKind::Package));
  ASSERT_TRUE(report.has(RaplKind::Dram));
  EXPECT_FALSE(report.has(RaplKind::PowerPlane0));
  const double pkg_j = report.total(RaplKind::Package);
  EXPECT_NEAR(pkg_j, report.total_direct(RaplKind::Package), 0.05 * pkg_j);
  EXPECT_NEAR(pkg_j, 40.0 * report.wall_seconds, 0.05 * 40.0 * report.wall_seconds);
  EXPECT_NEAR(report.total(RaplKind::Dram), 6.0 * report.wall_seconds, 0.05 * 6.0 * report.wall_seconds);
}

TEST(SamplesCsv, Format) {
  SampleSeries s;
  s.domains.push_back(RaplDomain{RaplKind::Dram, 1, {}, 10.0});
  s.samples.push_back({{0.0, 1.5}, {0.1, 2.25}});
  std::ostringstream out;
  write_samples_csv(out, s);
  EXPECT_EQ(out.str(), "t_s,domain,socket,cumulative_j\n0,dram,1,1.5\n0.1,dram,1,2.25\n");
}
