#pragma once

// Coordinate <-> linear index translation for row-major, Morton (Z) and
// Hilbert element orders over 2^n x 2^n matrices.
//
// Every index is a sequence of quadrant selections, one bit pair per level,
// most significant pair first. Morton takes the (y, x) bit pair verbatim;
// Hilbert relabels it and rotates the trailing bits of the interleaved word.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sfc {

enum class LayoutKind : std::uint8_t { RowMajor = 0, Morton = 1, Hilbert = 2 };

inline constexpr std::array<LayoutKind, 3> kAllLayouts = {
    LayoutKind::RowMajor, LayoutKind::Morton, LayoutKind::Hilbert};

/// Short lowercase name: "rowmajor", "morton", "hilbert".
std::string_view to_string(LayoutKind kind);
/// Short tag used in tables and CSV: "RM", "MO", "HO".
std::string_view short_name(LayoutKind kind);
/// Accepts the long name, the short tag, or common aliases ("rm", "zorder", ...).
std::optional<LayoutKind> parse_layout(std::string_view text);

/// Bits per dimension. The matrix side is 2^bits.
class CurveOrder {
 public:
  static constexpr unsigned kMinBits = 1;
  static constexpr unsigned kMaxBits = 31;

  explicit constexpr CurveOrder(unsigned bits) : bits_(bits) {
    if (bits < kMinBits || bits > kMaxBits) {
      throw std::out_of_range("curve order must be in [1, 31], got " +
                              std::to_string(bits));
    }
  }

  constexpr unsigned bits() const { return bits_; }
  constexpr std::uint64_t side() const { return std::uint64_t{1} << bits_; }
  constexpr std::uint64_t cells() const { return std::uint64_t{1} << (2 * bits_); }

  friend constexpr bool operator==(CurveOrder, CurveOrder) = default;

 private:
  unsigned bits_;
};

/// Matrix coordinates, y (row) major.
struct Coord2 {
  std::uint32_t y = 0;
  std::uint32_t x = 0;
  friend constexpr bool operator==(Coord2, Coord2) = default;
};

struct LinearIndex {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(LinearIndex, LinearIndex) = default;
};

/// Payload bits at even positions, odd positions zero.
struct DilatedWord {
  std::uint64_t value = 0;
  friend constexpr bool operator==(DilatedWord, DilatedWord) = default;
};

namespace detail {

inline constexpr std::uint64_t kEvenBits = 0x5555555555555555ULL;
inline constexpr std::uint64_t kOddBits = 0xAAAAAAAAAAAAAAAAULL;

// Raman-Wise dilation masks, widest stride first.
inline constexpr std::array<std::uint64_t, 5> kDilateMasks = {
    0x0000FFFF0000FFFFULL, 0x00FF00FF00FF00FFULL, 0x0F0F0F0F0F0F0F0FULL,
    0x3333333333333333ULL, 0x5555555555555555ULL};
inline constexpr std::array<unsigned, 5> kDilateShifts = {16, 8, 4, 2, 1};

// Hilbert label of a Morton quadrant (y bit << 1 | x bit); self-inverse.
//   (0,0)->0  (0,1)->1  (1,1)->2  (1,0)->3
inline constexpr std::array<std::uint64_t, 4> kHilbertLabel = {0, 1, 3, 2};

constexpr std::uint64_t swap_pairs(std::uint64_t w) {
  return ((w & kEvenBits) << 1) | ((w & kOddBits) >> 1);
}

}  // namespace detail

constexpr DilatedWord dilate(std::uint32_t v) {
  std::uint64_t w = v;
  for (std::size_t i = 0; i < detail::kDilateShifts.size(); ++i) {
    w = (w | (w << detail::kDilateShifts[i])) & detail::kDilateMasks[i];
  }
  return DilatedWord{w};
}

/// Inverse of dilate. Stray odd bits are masked away, not rejected.
constexpr std::uint32_t undilate(DilatedWord d) {
  std::uint64_t w = d.value & detail::kEvenBits;
  w = (w | (w >> 1)) & 0x3333333333333333ULL;
  w = (w | (w >> 2)) & 0x0F0F0F0F0F0F0F0FULL;
  w = (w | (w >> 4)) & 0x00FF00FF00FF00FFULL;
  w = (w | (w >> 8)) & 0x0000FFFF0000FFFFULL;
  w = (w | (w >> 16)) & 0x00000000FFFFFFFFULL;
  return static_cast<std::uint32_t>(w);
}

// Unchecked kernels used in the matmul inner loops. Callers guarantee that
// coordinates are below 2^bits and indices below 4^bits.
namespace unchecked {

constexpr std::uint64_t rowmajor(std::uint32_t y, std::uint32_t x, unsigned bits) {
  return std::uint64_t{y} * (std::uint64_t{1} << bits) + x;
}

constexpr std::uint64_t morton(std::uint32_t y, std::uint32_t x) {
  return (dilate(y).value << 1) | dilate(x).value;
}

constexpr Coord2 morton_inverse(std::uint64_t index) {
  return Coord2{undilate(DilatedWord{index >> 1}), undilate(DilatedWord{index})};
}

// Scan the interleaved word from the top pair down. Entering quadrant 0
// transposes the trailing bits; entering quadrant 3 transposes and complements.
constexpr std::uint64_t hilbert(std::uint32_t y, std::uint32_t x, unsigned bits) {
  std::uint64_t word = morton(y, x);
  std::uint64_t out = 0;
  for (unsigned level = bits; level-- > 0;) {
    const unsigned shift = 2 * level;
    const std::uint64_t label = detail::kHilbertLabel[(word >> shift) & 3U];
    out |= label << shift;
    const std::uint64_t trailing = (std::uint64_t{1} << shift) - 1;
    // Select instead of branching; labels are close to random in a matmul sweep.
    const std::uint64_t swap = -static_cast<std::uint64_t>(label == 0 || label == 3) & trailing;
    const std::uint64_t flip = -static_cast<std::uint64_t>(label == 3) & trailing;
    const std::uint64_t low = word & trailing;
    word = (word & ~trailing) | (((detail::swap_pairs(low) & swap) | (low & ~swap)) ^ flip);
  }
  return out;
}

// Rebuilds the interleaved word from the bottom level up; both rotations are
// involutions, so each level undoes itself.
constexpr Coord2 hilbert_inverse(std::uint64_t index, unsigned bits) {
  std::uint64_t word = 0;
  for (unsigned level = 0; level < bits; ++level) {
    const unsigned shift = 2 * level;
    const std::uint64_t label = (index >> shift) & 3U;
    const std::uint64_t trailing = (std::uint64_t{1} << shift) - 1;
    const std::uint64_t swap = -static_cast<std::uint64_t>(label == 0 || label == 3) & trailing;
    const std::uint64_t flip = -static_cast<std::uint64_t>(label == 3) & trailing;
    word = ((detail::swap_pairs(word) & swap) | (word & ~swap)) ^ flip;
    word |= detail::kHilbertLabel[label] << shift;
  }
  return morton_inverse(word);
}

constexpr std::uint64_t encode(LayoutKind kind, std::uint32_t y, std::uint32_t x,
                               unsigned bits) {
  switch (kind) {
    case LayoutKind::RowMajor: return rowmajor(y, x, bits);
    case LayoutKind::Morton: return morton(y, x);
    case LayoutKind::Hilbert: return hilbert(y, x, bits);
  }
  return 0;
}

}  // namespace unchecked

// Checked entry points; out-of-range inputs throw std::out_of_range.
LinearIndex rowmajor_encode(Coord2 c, CurveOrder order);
Coord2 rowmajor_decode(LinearIndex i, CurveOrder order);
LinearIndex morton_encode(Coord2 c, CurveOrder order);
Coord2 morton_decode(LinearIndex i, CurveOrder order);
LinearIndex hilbert_encode(Coord2 c, CurveOrder order);
Coord2 hilbert_decode(LinearIndex i, CurveOrder order);

LinearIndex encode(LayoutKind kind, Coord2 c, CurveOrder order);
Coord2 decode(LayoutKind kind, LinearIndex i, CurveOrder order);

/// Static count of shift/mask/arithmetic primitives in one encode.
///   RowMajor: one multiply and one add.
///   Morton:   two dilations of 5 shifts + 5 masks, plus shift-and-combine.
///   Hilbert:  Morton plus a fixed per-level scan step.
std::uint32_t op_cost(LayoutKind kind, CurveOrder order);

inline constexpr std::uint32_t kRowMajorOps = 2;
inline constexpr std::uint32_t kMortonOps = 2 * (5 + 5) + 2;
// Extract pair (shift, and), relabel (lookup), emit (shift, or), rotate the
// trailing bits (swap, complement, merge).
inline constexpr std::uint32_t kHilbertOpsPerLevel = 8;

}  // namespace sfc
