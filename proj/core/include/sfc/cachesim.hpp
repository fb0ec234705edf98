#pragma once

// Trace-driven set-associative cache hierarchy. LRU replacement,
// write-allocate, write-back (dirty evictions are not charged), physical
// address == logical address. A miss at level k is presented to level k+1 as
// an access of the same kind.

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfc/codec.hpp"
#include "sfc/trace.hpp"

namespace sfc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CacheLevelConfig {
  std::uint32_t line_bytes = 64;
  std::uint32_t sets = 64;
  std::uint32_t associativity = 8;
  // true: lines are installed here whenever a miss is filled through this
  // level (no back-invalidation). false: exclusive victim level; it receives
  // lines evicted from the level above, and a hit moves the line up.
  bool inclusive = true;

  std::uint64_t capacity_bytes() const {
    return std::uint64_t{line_bytes} * sets * associativity;
  }
};

struct HierarchyConfig {
  std::vector<CacheLevelConfig> levels;  // L1 first

  /// Throws ConfigError: empty hierarchy, non-power-of-two line size or set
  /// count, zero associativity, line size shrinking towards memory, or an
  /// exclusive first level.
  void validate() const;

  /// Xeon E5-2670: 32 KiB/8-way L1D, 256 KiB/8-way L2, 20 MiB/20-way L3, 64 B lines.
  static HierarchyConfig sandy_bridge_ep();
  /// Same L1/L2 with the last level shrunk to 256 KiB. 20 ways do not divide
  /// 256 KiB, so it borrows the 8-way/512-set shape of the L2.
  static HierarchyConfig desk_scale();
};

/// Accepts {"levels": [...]} or a bare array of level objects with keys
/// line_bytes, sets, associativity and optional inclusive.
HierarchyConfig parse_hierarchy_json(const std::string& text);
HierarchyConfig load_hierarchy(const std::filesystem::path& path);
std::string hierarchy_to_json(const HierarchyConfig& cfg);

struct LevelStats {
  std::uint64_t read_accesses = 0;
  std::uint64_t read_hits = 0;
  std::uint64_t read_misses = 0;
  std::uint64_t write_accesses = 0;
  std::uint64_t write_hits = 0;
  std::uint64_t write_misses = 0;

  std::uint64_t accesses() const { return read_accesses + write_accesses; }
  std::uint64_t hits() const { return read_hits + write_hits; }
  std::uint64_t misses() const { return read_misses + write_misses; }
  friend bool operator==(const LevelStats&, const LevelStats&) = default;
};

struct SimStats {
  std::vector<LevelStats> levels;
  const LevelStats& last_level() const { return levels.back(); }
  friend bool operator==(const SimStats&, const SimStats&) = default;
};

class CacheHierarchy {
 public:
  explicit CacheHierarchy(HierarchyConfig cfg);

  void access(AccessRecord r);
  void operator()(AccessRecord r) { access(r); }

  const SimStats& stats() const { return stats_; }
  const HierarchyConfig& config() const { return cfg_; }

 private:
  struct Level {
    CacheLevelConfig cfg;
    unsigned line_shift = 0;
    std::uint64_t set_mask = 0;
    std::vector<std::uint64_t> tags;    // sets * associativity, line address + 1; 0 = empty
    std::vector<std::uint64_t> stamps;  // last-use time per way
  };
  static std::size_t set_base(const Level& level, std::uint64_t line);
  // Way holding `line`, or npos.
  static std::size_t find(const Level& level, std::uint64_t line);
  // Installs `line` into the LRU way; returns the evicted line + 1, 0 if none.
  std::uint64_t install(Level& level, std::uint64_t line);
  void fill(std::size_t level, std::uint64_t address);

  HierarchyConfig cfg_;
  std::vector<Level> levels_;
  SimStats stats_;
  std::uint64_t clock_ = 0;
};

SimStats simulate(std::span<const AccessRecord> trace, const HierarchyConfig& cfg);

struct LayoutSimResult {
  LayoutKind layout = LayoutKind::RowMajor;
  SimStats stats;
  // Distinct last-level lines touched: the cold-start (compulsory) misses.
  std::uint64_t compulsory_misses = 0;
  std::uint64_t trace_records = 0;
};

/// Streams the matmul trace for each layout through a fresh hierarchy.
std::vector<LayoutSimResult> compare_layouts(
    CurveOrder order, const HierarchyConfig& cfg, RowRange rows,
    TraceOptions opts = {},
    std::span<const LayoutKind> layouts = std::span<const LayoutKind>(kAllLayouts));

}  // namespace sfc
