#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bench_cli.hpp"

namespace sfc::cli {

namespace {

struct DomainColumn {
  const char* name;
  std::optional<double> ResultRow::*field;
};

constexpr DomainColumn kDomains[] = {
    {"package", &ResultRow::pkg_j},
    {"pp0", &ResultRow::pp0_j},
    {"dram", &ResultRow::dram_j},
};

}  // namespace

std::vector<EnergyTimeSeries> energy_time_series(const std::vector<ResultRow>& rows) {
  const bool have_summaries =
      std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.is_summary(); });
  std::vector<EnergyTimeSeries> out;
  for (LayoutKind layout : kAllLayouts) {
    for (const auto& dom : kDomains) {
      EnergyTimeSeries s{layout, dom.name, {}};
      for (const auto& r : rows) {
        if (r.layout != layout || r.is_summary() != have_summaries || !(r.*dom.field)) continue;
        s.points.emplace_back(r.wall_s, *(r.*dom.field));
      }
      if (s.points.empty()) continue;
      std::sort(s.points.begin(), s.points.end());
      out.push_back(std::move(s));
    }
  }
  if (out.empty()) throw std::runtime_error("no energy data in bench CSV");
  return out;
}

std::string energy_time_data(const std::vector<EnergyTimeSeries>& series) {
  std::ostringstream out;
  char buf[96];
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i > 0) out << "\n\n";
    out << "# " << short_name(series[i].layout) << ' ' << series[i].domain << '\n';
    out << "# wall_seconds joules\n";
    for (const auto& [t, j] : series[i].points) {
      std::snprintf(buf, sizeof buf, "%.6f %.6f\n", t, j);
      out << buf;
    }
  }
  return out.str();
}

std::string energy_time_gnuplot(const std::vector<EnergyTimeSeries>& series,
                                const std::string& data_file, const std::string& image_file) {
  std::ostringstream gp;
  gp << "set terminal pngcairo size 1200,800\n"
     << "set output '" << image_file << "'\n"
     << "set xlabel 'Execution time [s]'\n"
     << "set ylabel 'Energy [J]'\n"
     << "set key outside right\n"
     << "set grid\n"
     << "plot \\\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    // Dashed for row-major, solid for the curves; one colour per domain.
    const int dash = s.layout == LayoutKind::RowMajor ? 2 : 1;
    const int colour = s.domain == "package" ? 1 : s.domain == "pp0" ? 2 : 3;
    gp << "  '" << data_file << "' index " << i << " using 1:2 with linespoints dt " << dash
       << " lc " << colour << " title '" << short_name(s.layout) << ' ' << s.domain << '\''
       << (i + 1 < series.size() ? ", \\\n" : "\n");
  }
  return gp.str();
}

}  // namespace sfc::cli
