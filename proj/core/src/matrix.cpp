#include "sfc/matrix.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <stdexcept>
#include <thread>

namespace sfc {

namespace {

struct RowMajorIndexer {
  unsigned bits;
  std::uint64_t operator()(std::uint32_t y, std::uint32_t x) const {
    return unchecked::rowmajor(y, x, bits);
  }
};

struct MortonIndexer {
  std::uint64_t operator()(std::uint32_t y, std::uint32_t x) const {
    return unchecked::morton(y, x);
  }
};

struct HilbertIndexer {
  unsigned bits;
  std::uint64_t operator()(std::uint32_t y, std::uint32_t x) const {
    return unchecked::hilbert(y, x, bits);
  }
};

// The index is recomputed for every access; that cost is what the layouts trade.
template <typename Indexer>
void multiply_rows(const double* a, const double* b, double* c, std::uint32_t side,
                   std::uint32_t row_begin, std::uint32_t row_end, Indexer index) {
  for (std::uint32_t y = row_begin; y < row_end; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      double sum = 0.0;
      for (std::uint32_t k = 0; k < side; ++k) {
        sum += a[index(y, k)] * b[index(k, x)];
      }
      c[index(y, x)] = sum;
    }
  }
}

void multiply_block(const MatrixF64& a, const MatrixF64& b, MatrixF64& c,
                    std::uint32_t row_begin, std::uint32_t row_end) {
  const auto side = static_cast<std::uint32_t>(a.side());
  const unsigned bits = a.order().bits();
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* pc = c.data().data();
  switch (a.layout()) {
    case LayoutKind::RowMajor:
      multiply_rows(pa, pb, pc, side, row_begin, row_end, RowMajorIndexer{bits});
      break;
    case LayoutKind::Morton:
      multiply_rows(pa, pb, pc, side, row_begin, row_end, MortonIndexer{});
      break;
    case LayoutKind::Hilbert:
      multiply_rows(pa, pb, pc, side, row_begin, row_end, HilbertIndexer{bits});
      break;
  }
}

}  // namespace

MatrixF64::MatrixF64(CurveOrder order, LayoutKind layout)
    : order_(order), layout_(layout), data_(order.cells(), 0.0) {}

MatrixF64 MatrixF64::zeros(CurveOrder order, LayoutKind layout) {
  return MatrixF64(order, layout);
}

double MatrixF64::get(Coord2 c) const {
  return data_[encode(layout_, c, order_).value];
}

void MatrixF64::set(Coord2 c, double value) {
  data_[encode(layout_, c, order_).value] = value;
}

bool operator==(const MatrixF64& a, const MatrixF64& b) {
  if (a.order_ != b.order_ || a.layout_ != b.layout_) return false;
  return std::equal(a.data_.begin(), a.data_.end(), b.data_.begin(),
                    [](double l, double r) {
                      return std::bit_cast<std::uint64_t>(l) ==
                             std::bit_cast<std::uint64_t>(r);
                    });
}

MatrixF64 convert(const MatrixF64& m, LayoutKind target) {
  MatrixF64 out = MatrixF64::zeros(m.order(), target);
  if (target == m.layout()) {
    std::copy(m.data().begin(), m.data().end(), out.data().begin());
    return out;
  }
  const unsigned bits = m.order().bits();
  const auto src = m.data();
  auto dst = out.data();
  for (std::uint64_t i = 0; i < src.size(); ++i) {
    const Coord2 c = decode(m.layout(), LinearIndex{i}, m.order());
    dst[unchecked::encode(target, c.y, c.x, bits)] = src[i];
  }
  return out;
}

MatrixF64 identity(CurveOrder order, LayoutKind layout) {
  MatrixF64 m = MatrixF64::zeros(order, layout);
  for (std::uint32_t i = 0; i < order.side(); ++i) m.set({i, i}, 1.0);
  return m;
}

MatrixF64 matmul(const MatrixF64& a, const MatrixF64& b, unsigned workers) {
  if (a.order() != b.order()) {
    throw std::invalid_argument("matmul: operand orders differ");
  }
  if (a.layout() != b.layout()) {
    throw std::invalid_argument("matmul: operand layouts differ");
  }
  if (workers == 0) {
    throw std::invalid_argument("matmul: workers must be >= 1");
  }
  MatrixF64 c = MatrixF64::zeros(a.order(), a.layout());
  const auto rows = static_cast<std::uint32_t>(a.side());
  const std::uint32_t used = std::min<std::uint32_t>(workers, rows);
  if (used == 1) {
    multiply_block(a, b, c, 0, rows);
    return c;
  }

  // Static block partition: worker w owns rows [w*rows/used, (w+1)*rows/used).
  std::vector<std::jthread> pool;
  pool.reserve(used);
  for (std::uint32_t w = 0; w < used; ++w) {
    const auto begin = static_cast<std::uint32_t>(std::uint64_t{rows} * w / used);
    const auto end = static_cast<std::uint32_t>(std::uint64_t{rows} * (w + 1) / used);
    pool.emplace_back([&a, &b, &c, begin, end] { multiply_block(a, b, c, begin, end); });
  }
  pool.clear();
  return c;
}

MatrixF64 random_matrix(CurveOrder order, LayoutKind layout, std::uint64_t seed) {
  MatrixF64 m = MatrixF64::zeros(order, layout);
  std::mt19937_64 gen(seed);
  const auto side = static_cast<std::uint32_t>(order.side());
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      // Top 53 bits scaled to [0, 1); avoids the implementation-defined
      // uniform_real_distribution.
      const double v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      m.data()[unchecked::encode(layout, y, x, order.bits())] = v;
    }
  }
  return m;
}

std::uint64_t checksum(const MatrixF64& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto side = static_cast<std::uint32_t>(m.side());
  const unsigned bits = m.order().bits();
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      auto word = std::bit_cast<std::uint64_t>(
          m.data()[unchecked::encode(m.layout(), y, x, bits)]);
      for (int byte = 0; byte < 8; ++byte) {
        h ^= word & 0xFF;
        h *= 0x100000001b3ULL;
        word >>= 8;
      }
    }
  }
  return h;
}

}  // namespace sfc
