#pragma once

// Matrix fixture files:
//
//   offset  size  field
//   0       4     magic "SFCM"
//   4       4     u32 n (bits per dimension)
//   8       4     u32 layout tag (0 row-major, 1 Morton, 2 Hilbert)
//   12      4     u32 reserved, zero
//   16      8*4^n little-endian f64 elements in storage order

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "sfc/matrix.hpp"

namespace sfc {

class MatrixFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMatrixHeaderBytes = 16;

void write_matrix(std::ostream& out, const MatrixF64& m);
MatrixF64 read_matrix(std::istream& in);

void save_matrix(const std::filesystem::path& path, const MatrixF64& m);
MatrixF64 load_matrix(const std::filesystem::path& path);

}  // namespace sfc
