#include "sfc/codec.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace sfc {

namespace {

void check_coord(Coord2 c, CurveOrder order) {
  if (c.y >= order.side() || c.x >= order.side()) {
    throw std::out_of_range("coordinate (" + std::to_string(c.y) + "," +
                            std::to_string(c.x) + ") outside " +
                            std::to_string(order.side()) + "x" +
                            std::to_string(order.side()) + " matrix");
  }
}

void check_index(LinearIndex i, CurveOrder order) {
  if (i.value >= order.cells()) {
    throw std::out_of_range("index " + std::to_string(i.value) + " outside [0, " +
                            std::to_string(order.cells()) + ")");
  }
}

}  // namespace

std::string_view to_string(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::RowMajor: return "rowmajor";
    case LayoutKind::Morton: return "morton";
    case LayoutKind::Hilbert: return "hilbert";
  }
  return "?";
}

std::string_view short_name(LayoutKind kind) {
  switch (kind) {
    case LayoutKind::RowMajor: return "RM";
    case LayoutKind::Morton: return "MO";
    case LayoutKind::Hilbert: return "HO";
  }
  return "?";
}

std::optional<LayoutKind> parse_layout(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "rowmajor" || s == "row-major" || s == "rm" || s == "row") {
    return LayoutKind::RowMajor;
  }
  if (s == "morton" || s == "mo" || s == "z" || s == "zorder" || s == "zo") {
    return LayoutKind::Morton;
  }
  if (s == "hilbert" || s == "ho") {
    return LayoutKind::Hilbert;
  }
  return std::nullopt;
}

LinearIndex rowmajor_encode(Coord2 c, CurveOrder order) {
  check_coord(c, order);
  return LinearIndex{unchecked::rowmajor(c.y, c.x, order.bits())};
}

Coord2 rowmajor_decode(LinearIndex i, CurveOrder order) {
  check_index(i, order);
  return Coord2{static_cast<std::uint32_t>(i.value >> order.bits()),
                static_cast<std::uint32_t>(i.value & (order.side() - 1))};
}

LinearIndex morton_encode(Coord2 c, CurveOrder order) {
  check_coord(c, order);
  return LinearIndex{unchecked::morton(c.y, c.x)};
}

Coord2 morton_decode(LinearIndex i, CurveOrder order) {
  check_index(i, order);
  return unchecked::morton_inverse(i.value);
}

LinearIndex hilbert_encode(Coord2 c, CurveOrder order) {
  check_coord(c, order);
  return LinearIndex{unchecked::hilbert(c.y, c.x, order.bits())};
}

Coord2 hilbert_decode(LinearIndex i, CurveOrder order) {
  check_index(i, order);
  return unchecked::hilbert_inverse(i.value, order.bits());
}

LinearIndex encode(LayoutKind kind, Coord2 c, CurveOrder order) {
  switch (kind) {
    case LayoutKind::RowMajor: return rowmajor_encode(c, order);
    case LayoutKind::Morton: return morton_encode(c, order);
    case LayoutKind::Hilbert: return hilbert_encode(c, order);
  }
  throw std::invalid_argument("unknown layout");
}

Coord2 decode(LayoutKind kind, LinearIndex i, CurveOrder order) {
  switch (kind) {
    case LayoutKind::RowMajor: return rowmajor_decode(i, order);
    case LayoutKind::Morton: return morton_decode(i, order);
    case LayoutKind::Hilbert: return hilbert_decode(i, order);
  }
  throw std::invalid_argument("unknown layout");
}

std::uint32_t op_cost(LayoutKind kind, CurveOrder order) {
  switch (kind) {
    case LayoutKind::RowMajor: return kRowMajorOps;
    case LayoutKind::Morton: return kMortonOps;
    case LayoutKind::Hilbert: return kMortonOps + kHilbertOpsPerLevel * order.bits();
  }
  return 0;
}

}  // namespace sfc
