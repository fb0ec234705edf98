#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <sstream>

#include "sfc/matrix.hpp"
#include "sfc/matrix_io.hpp"
#include "support/oracles.hpp"
#include "support/powercap_fixture.hpp"

using namespace sfc;

namespace {

MatrixF64 from_rows(unsigned n, LayoutKind layout, const std::vector<double>& rm) {
  MatrixF64 m = MatrixF64::zeros(CurveOrder(n), layout);
  const auto side = static_cast<std::uint32_t>(m.side());
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) m.set({y, x}, rm[y * side + x]);
  }
  return m;
}

std::vector<double> to_rows(const MatrixF64& m) {
  const auto side = static_cast<std::uint32_t>(m.side());
  std::vector<double> out(std::size_t{side} * side);
  for (std::uint32_t y = 0; y < side; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) out[y * side + x] = m.get({y, x});
  }
  return out;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

}  // namespace

TEST(Matrix, Zeros) {
  EXPECT_EQ(MatrixF64::zeros(CurveOrder(1), LayoutKind::Morton).get({1, 1}), 0.0);
  const auto z = MatrixF64::zeros(CurveOrder(3), LayoutKind::RowMajor);
  EXPECT_EQ(z.data().size(), 64U);
  double sum = 0.0;
  for (double v : z.data()) sum += v;
  EXPECT_EQ(sum, 0.0);
}

TEST(Matrix, SetStoresAtEncodedIndex) {
  auto m = MatrixF64::zeros(CurveOrder(3), LayoutKind::Morton);
  m.set({3, 5}, 4.5);
  EXPECT_EQ(m.data()[27], 4.5);
  EXPECT_EQ(m.get({3, 5}), 4.5);
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    if (i != 27) EXPECT_EQ(m.data()[i], 0.0);
  }

  auto h = MatrixF64::zeros(CurveOrder(1), LayoutKind::Hilbert);
  h.set({1, 0}, 7.0);
  EXPECT_EQ(h.data()[3], 7.0);

  for (LayoutKind k : kAllLayouts) {
    auto z = MatrixF64::zeros(CurveOrder(2), k);
    z.set({0, 0}, 1.0);
    EXPECT_EQ(z.data()[0], 1.0);
  }
}

TEST(Matrix, OutOfRangeAccessThrows) {
  auto m = MatrixF64::zeros(CurveOrder(2), LayoutKind::Hilbert);
  EXPECT_THROW(m.get({4, 0}), std::out_of_range);
  EXPECT_THROW(m.set({0, 4}, 1.0), std::out_of_range);
}

TEST(Convert, TwoByTwoToHilbert) {
  const auto rm = from_rows(1, LayoutKind::RowMajor, {1.0, 2.0, 3.0, 4.0});
  const auto h = convert(rm, LayoutKind::Hilbert);
  const std::vector<double> data(h.data().begin(), h.data().end());
  EXPECT_EQ(data, (std::vector<double>{1.0, 2.0, 4.0, 3.0}));
}

TEST(Convert, RoundTripIsExact) {
  const auto m = random_matrix(CurveOrder(5), LayoutKind::RowMajor, 3);
  for (LayoutKind k : kAllLayouts) {
    EXPECT_EQ(convert(convert(m, k), LayoutKind::RowMajor), m);
  }
  const auto z = MatrixF64::zeros(CurveOrder(3), LayoutKind::RowMajor);
  EXPECT_EQ(convert(z, LayoutKind::Hilbert), MatrixF64::zeros(CurveOrder(3), LayoutKind::Hilbert));
}

TEST(Matmul, HandExample) {
  for (LayoutKind k : kAllLayouts) {
    const auto a = from_rows(1, k, {1, 2, 3, 4});
    const auto b = from_rows(1, k, {5, 6, 7, 8});
    EXPECT_EQ(to_rows(matmul(a, b)), (std::vector<double>{19, 22, 43, 50}));
  }
}

TEST(Matmul, IdentityIsNeutral) {
  for (LayoutKind k : kAllLayouts) {
    const auto a = random_matrix(CurveOrder(4), k, 99);
    EXPECT_EQ(matmul(identity(CurveOrder(4), k), a), a);
    EXPECT_EQ(matmul(a, identity(CurveOrder(4), k)), a);
  }
}

TEST(Matmul, RejectsMismatches) {
  const auto a = MatrixF64::zeros(CurveOrder(2), LayoutKind::Morton);
  EXPECT_THROW(matmul(a, MatrixF64::zeros(CurveOrder(3), LayoutKind::Morton)), std::invalid_argument);
  EXPECT_THROW(matmul(a, MatrixF64::zeros(CurveOrder(2), LayoutKind::Hilbert)), std::invalid_argument);
  EXPECT_THROW(matmul(a, a, 0), std::invalid_argument);
}

TEST(Matmul, LayoutIndependentAndMatchesReference) {
  for (unsigned n = 1; n <= 8; ++n) {
    const auto a_rm = random_matrix(CurveOrder(n), LayoutKind::RowMajor, 100 + n);
    const auto b_rm = random_matrix(CurveOrder(n), LayoutKind::RowMajor, 200 + n);
    const auto ref = oracle::matmul(to_rows(a_rm), to_rows(b_rm), a_rm.side());
    for (LayoutKind k : kAllLayouts) {
      const auto c = matmul(convert(a_rm, k), convert(b_rm, k));
      EXPECT_EQ(c.layout(), k);
      EXPECT_TRUE(same_bits(to_rows(c), ref)) << "n=" << n << " " << to_string(k);
    }
  }
}

TEST(Matmul, WorkerCountDoesNotChangeBits) {
  for (LayoutKind k : kAllLayouts) {
    const auto a = random_matrix(CurveOrder(6), k, 1);
    const auto b = random_matrix(CurveOrder(6), k, 2);
    const auto one = matmul(a, b, 1);
    for (unsigned w : {2U, 3U, 4U, 8U, 100U}) EXPECT_EQ(matmul(a, b, w), one) << w;
  }
  // More workers than rows.
  const auto a = random_matrix(CurveOrder(1), LayoutKind::Hilbert, 5);
  EXPECT_EQ(matmul(a, a, 8), matmul(a, a, 1));
}

TEST(RandomMatrix, DependsOnSeedNotLayout) {
  const auto rm = random_matrix(CurveOrder(4), LayoutKind::RowMajor, 42);
  for (LayoutKind k : kAllLayouts) {
    EXPECT_EQ(to_rows(random_matrix(CurveOrder(4), k, 42)), to_rows(rm));
  }
  EXPECT_NE(to_rows(random_matrix(CurveOrder(4), LayoutKind::RowMajor, 43)), to_rows(rm));
  for (double v : rm.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(Checksum, LayoutInvariant) {
  const auto rm = random_matrix(CurveOrder(5), LayoutKind::RowMajor, 8);
  for (LayoutKind k : kAllLayouts) EXPECT_EQ(checksum(convert(rm, k)), checksum(rm));
  auto other = rm;
  other.set({0, 0}, 0.5);
  EXPECT_NE(checksum(other), checksum(rm));
}

TEST(MatrixIo, StreamRoundTrip) {
  for (LayoutKind k : kAllLayouts) {
    const auto m = random_matrix(CurveOrder(3), k, 17);
    std::stringstream buf;
    write_matrix(buf, m);
    const std::string bytes = buf.str();
    ASSERT_EQ(bytes.size(), kMatrixHeaderBytes + 8 * 64);
    EXPECT_EQ(bytes.substr(0, 4), "SFCM");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 3);
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), static_cast<unsigned>(k));
    EXPECT_EQ(read_matrix(buf), m);
  }
}

TEST(MatrixIo, LittleEndianPayload) {
  auto m = MatrixF64::zeros(CurveOrder(1), LayoutKind::RowMajor);
  m.set({0, 0}, 1.0);  // 0x3FF0000000000000
  std::stringstream buf;
  write_matrix(buf, m);
  const std::string bytes = buf.str();
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 6]), 0xF0);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16 + 7]), 0x3F);
}

TEST(MatrixIo, RejectsBadInput) {
  std::stringstream bad_magic("XXXX");
  EXPECT_THROW(read_matrix(bad_magic), MatrixFormatError);

  const auto m = random_matrix(CurveOrder(2), LayoutKind::Morton, 1);
  std::stringstream buf;
  write_matrix(buf, m);
  std::string bytes = buf.str();
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_matrix(truncated), MatrixFormatError);

  bytes[8] = 9;
  std::stringstream bad_layout(bytes);
  EXPECT_THROW(read_matrix(bad_layout), MatrixFormatError);
}

TEST(MatrixIo, FileRoundTrip) {
  fixture::TempDir dir;
  const auto m = random_matrix(CurveOrder(4), LayoutKind::Hilbert, 23);
  save_matrix(dir / "m.sfcm", m);
  EXPECT_EQ(load_matrix(dir / "m.sfcm"), m);
  EXPECT_THROW(load_matrix(dir / "missing.sfcm"), std::runtime_error);
}
