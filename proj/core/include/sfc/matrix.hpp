#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sfc/codec.hpp"

namespace sfc {

/// Square 2^n x 2^n matrix of doubles. Element (y, x) lives at
/// data()[encode(layout, (y, x), order)]. Order and layout are fixed at
/// construction.
class MatrixF64 {
 public:
  static MatrixF64 zeros(CurveOrder order, LayoutKind layout);

  CurveOrder order() const { return order_; }
  LayoutKind layout() const { return layout_; }
  std::uint64_t side() const { return order_.side(); }

  double get(Coord2 c) const;
  void set(Coord2 c, double value);

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Bit-exact comparison of element values and storage scheme.
  friend bool operator==(const MatrixF64& a, const MatrixF64& b);

 private:
  MatrixF64(CurveOrder order, LayoutKind layout);

  CurveOrder order_;
  LayoutKind layout_;
  std::vector<double> data_;
};

/// Same elements, stored under `target`.
MatrixF64 convert(const MatrixF64& m, LayoutKind target);

MatrixF64 identity(CurveOrder order, LayoutKind layout);

/// C = A * B with the i-j-k loop nest, k innermost and ascending, so the
/// floating-point result does not depend on layout or worker count.
/// Output rows are split into `workers` contiguous blocks.
/// Throws std::invalid_argument on order/layout mismatch or workers == 0.
MatrixF64 matmul(const MatrixF64& a, const MatrixF64& b, unsigned workers = 1);

/// Uniform [0, 1) entries from a 64-bit seeded generator. Values depend
/// only on (order, seed), never on layout.
MatrixF64 random_matrix(CurveOrder order, LayoutKind layout, std::uint64_t seed);

/// FNV-1a over the bit patterns of all elements visited in row-major order.
std::uint64_t checksum(const MatrixF64& m);

}  // namespace sfc
