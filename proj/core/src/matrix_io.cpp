#include "sfc/matrix_io.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

namespace sfc {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'F', 'C', 'M'};

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b.data(), b.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!in) throw MatrixFormatError("matrix file truncated");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_matrix(std::ostream& out, const MatrixF64& m) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, m.order().bits());
  put_u32(out, static_cast<std::uint32_t>(m.layout()));
  put_u32(out, 0);
  for (double v : m.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw MatrixFormatError("failed writing matrix");
}

MatrixF64 read_matrix(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw MatrixFormatError("bad matrix magic");
  const auto bits = get_le<std::uint32_t>(in);
  const auto tag = get_le<std::uint32_t>(in);
  get_le<std::uint32_t>(in);
  if (bits < CurveOrder::kMinBits || bits > CurveOrder::kMaxBits) {
    throw MatrixFormatError("bad matrix order " + std::to_string(bits));
  }
  if (tag > static_cast<std::uint32_t>(LayoutKind::Hilbert)) {
    throw MatrixFormatError("bad layout tag " + std::to_string(tag));
  }
  MatrixF64 m = MatrixF64::zeros(CurveOrder(bits), static_cast<LayoutKind>(tag));
  for (double& v : m.data()) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
  return m;
}

void save_matrix(const std::filesystem::path& path, const MatrixF64& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MatrixFormatError("cannot open " + path.string());
  write_matrix(out, m);
}

MatrixF64 load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixFormatError("cannot open " + path.string());
  return read_matrix(in);
}

}  // namespace sfc
