#include "sfc/cachesim.hpp"

#include <bit>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_set>

namespace sfc {

namespace {

CacheLevelConfig level_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("cache level must be a JSON object");
  CacheLevelConfig lvl;
  try {
    lvl.line_bytes = j.at("line_bytes").get<std::uint32_t>();
    lvl.sets = j.at("sets").get<std::uint32_t>();
    lvl.associativity = j.at("associativity").get<std::uint32_t>();
    lvl.inclusive = j.value("inclusive", true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("cache level: ") + e.what());
  }
  return lvl;
}

}  // namespace

void HierarchyConfig::validate() const {
  if (levels.empty()) throw ConfigError("hierarchy has no levels");
  std::uint32_t prev_line = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const std::string where = "level " + std::to_string(i + 1) + ": ";
    if (l.line_bytes == 0 || !std::has_single_bit(l.line_bytes)) {
      throw ConfigError(where + "line_bytes must be a power of two");
    }
    if (l.sets == 0 || !std::has_single_bit(l.sets)) {
      throw ConfigError(where + "sets must be a power of two");
    }
    if (l.associativity == 0) throw ConfigError(where + "associativity must be >= 1");
    if (l.line_bytes < prev_line) {
      throw ConfigError(where + "line size smaller than the level above");
    }
    prev_line = l.line_bytes;
  }
  if (!levels.front().inclusive) throw ConfigError("level 1 cannot be exclusive");
}

HierarchyConfig HierarchyConfig::sandy_bridge_ep() {
  return HierarchyConfig{{
      {64, 64, 8, true},      // 32 KiB
      {64, 512, 8, true},     // 256 KiB
      {64, 16384, 20, true},  // 20 MiB
  }};
}

HierarchyConfig HierarchyConfig::desk_scale() {
  return HierarchyConfig{{
      {64, 64, 8, true},
      {64, 512, 8, true},
      {64, 512, 8, true},  // 256 KiB, same geometry as L2
  }};
}

HierarchyConfig parse_hierarchy_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("hierarchy JSON: ") + e.what());
  }
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("levels")) throw ConfigError("hierarchy JSON lacks \"levels\"");
    arr = &j["levels"];
  }
  if (!arr->is_array()) throw ConfigError("hierarchy levels must be an array");
  HierarchyConfig cfg;
  for (const auto& lvl : *arr) cfg.levels.push_back(level_from_json(lvl));
  cfg.validate();
  return cfg;
}

HierarchyConfig load_hierarchy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hierarchy_json(ss.str());
}

std::string hierarchy_to_json(const HierarchyConfig& cfg) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : cfg.levels) {
    levels.push_back({{"line_bytes", l.line_bytes},
                      {"sets", l.sets},
                      {"associativity", l.associativity},
                      {"inclusive", l.inclusive}});
  }
  return nlohmann::json{{"levels", levels}}.dump(2);
}

CacheHierarchy::CacheHierarchy(HierarchyConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  for (const auto& c : cfg_.levels) {
    Level lvl;
    lvl.cfg = c;
    lvl.line_shift = static_cast<unsigned>(std::countr_zero(c.line_bytes));
    lvl.set_mask = c.sets - 1;
    lvl.tags.assign(std::size_t{c.sets} * c.associativity, 0);
    lvl.stamps.assign(lvl.tags.size(), 0);
    levels_.push_back(std::move(lvl));
  }
  stats_.levels.resize(levels_.size());
}

std::size_t CacheHierarchy::set_base(const Level& level, std::uint64_t line) {
  return static_cast<std::size_t>(line & level.set_mask) * level.cfg.associativity;
}

std::size_t CacheHierarchy::find(const Level& level, std::uint64_t line) {
  const std::size_t first = set_base(level, line);
  for (std::size_t w = first; w < first + level.cfg.associativity; ++w) {
    if (level.tags[w] == line + 1) return w;
  }
  return std::string::npos;
}

std::uint64_t CacheHierarchy::install(Level& level, std::uint64_t line) {
  const std::size_t first = set_base(level, line);
  std::size_t victim = first;
  // Empty ways carry stamp 0, so they are taken before anything is evicted.
  for (std::size_t w = first; w < first + level.cfg.associativity; ++w) {
    if (level.stamps[w] < level.stamps[victim]) victim = w;
  }
  const std::uint64_t evicted = level.tags[victim];
  level.tags[victim] = line + 1;
  level.stamps[victim] = clock_;
  return evicted;
}

// Pushes a victim address into level `index` and below while levels are exclusive.
void CacheHierarchy::fill(std::size_t index, std::uint64_t address) {
  while (index < levels_.size() && !levels_[index].cfg.inclusive) {
    Level& level = levels_[index];
    const std::uint64_t line = address >> level.line_shift;
    const std::size_t way = find(level, line);
    if (way != std::string::npos) {
      level.stamps[way] = clock_;
      return;
    }
    const std::uint64_t evicted = install(level, line);
    if (evicted == 0) return;
    address = (evicted - 1) << level.line_shift;
    ++index;
  }
}

void CacheHierarchy::access(AccessRecord r) {
  ++clock_;
  std::size_t hit_level = levels_.size();
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    Level& level = levels_[i];
    LevelStats& s = stats_.levels[i];
    const std::size_t way = find(level, r.address >> level.line_shift);
    const bool hit = way != std::string::npos;
    if (r.kind == AccessKind::Read) {
      ++s.read_accesses;
      ++(hit ? s.read_hits : s.read_misses);
    } else {
      ++s.write_accesses;
      ++(hit ? s.write_hits : s.write_misses);
    }
    if (hit) {
      if (level.cfg.inclusive) {
        level.stamps[way] = clock_;
      } else {
        level.tags[way] = 0;
        level.stamps[way] = 0;
      }
      hit_level = i;
      break;
    }
  }
  // Fill the levels above the hit, nearest first; evictions feed exclusive levels below.
  for (std::size_t j = hit_level; j-- > 0;) {
    Level& level = levels_[j];
    if (!level.cfg.inclusive) continue;
    const std::uint64_t evicted = install(level, r.address >> level.line_shift);
    if (evicted != 0) fill(j + 1, (evicted - 1) << level.line_shift);
  }
}

SimStats simulate(std::span<const AccessRecord> trace, const HierarchyConfig& cfg) {
  CacheHierarchy sim(cfg);
  for (const auto& r : trace) sim.access(r);
  return sim.stats();
}

std::vector<LayoutSimResult> compare_layouts(CurveOrder order, const HierarchyConfig& cfg,
                                             RowRange rows, TraceOptions opts,
                                             std::span<const LayoutKind> layouts) {
  cfg.validate();
  const unsigned ll_shift =
      static_cast<unsigned>(std::countr_zero(cfg.levels.back().line_bytes));
  std::vector<LayoutSimResult> out;
  for (LayoutKind layout : layouts) {
    CacheHierarchy sim(cfg);
    std::unordered_set<std::uint64_t> lines;
    std::uint64_t records = 0;
    matmul_trace(order, layout, rows, opts, [&](AccessRecord r) {
      sim.access(r);
      lines.insert(r.address >> ll_shift);
      ++records;
    });
    out.push_back(LayoutSimResult{layout, sim.stats(), lines.size(), records});
  }
  return out;
}

}  // namespace sfc
