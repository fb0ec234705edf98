#pragma once

// Logical memory-access trace of the i-j-k matmul loop. Records are produced
// in execution order and streamed to a sink; nothing is buffered unless the
// caller asks for it.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "sfc/codec.hpp"

namespace sfc {

enum class AccessKind : std::uint8_t { Read = 0, Write = 1 };

struct AccessRecord {
  std::uint64_t address = 0;  // element base + 8 * linear index
  AccessKind kind = AccessKind::Read;
  friend constexpr bool operator==(AccessRecord, AccessRecord) = default;
};

/// Half-open range of output rows [begin, end).
struct RowRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  constexpr std::uint32_t size() const { return end > begin ? end - begin : 0; }
};

/// All rows of the matrix.
RowRange all_rows(CurveOrder order);
/// `count` rows centred on the middle of the matrix, clamped to the matrix.
RowRange middle_rows(CurveOrder order, std::uint32_t count);

struct TraceOptions {
  // true: C(y,x) is read once before the k loop and written once after it,
  // as optimized code keeps the accumulator in a register.
  // false: one C write per k step, modelling a naive load-modify-store.
  bool c_in_register = true;
};

/// Base addresses of A, B and C: consecutive, 64-byte aligned, A at 0.
struct OperandBases {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
};
OperandBases operand_bases(CurveOrder order);

/// Number of records matmul_trace emits.
std::uint64_t trace_length(CurveOrder order, RowRange rows, TraceOptions opts = {});

/// Streams the trace to `sink(AccessRecord)`. An empty row range yields nothing.
template <typename Sink>
void matmul_trace(CurveOrder order, LayoutKind layout, RowRange rows,
                  TraceOptions opts, Sink&& sink) {
  if (rows.end > order.side()) {
    throw std::out_of_range("row range exceeds matrix side");
  }
  const OperandBases base = operand_bases(order);
  const unsigned bits = order.bits();
  const auto side = static_cast<std::uint32_t>(order.side());
  auto addr = [&](std::uint64_t region, std::uint32_t y, std::uint32_t x) {
    return region + 8 * unchecked::encode(layout, y, x, bits);
  };
  for (std::uint32_t y = rows.begin; y < rows.end; ++y) {
    for (std::uint32_t x = 0; x < side; ++x) {
      const std::uint64_t c_addr = addr(base.c, y, x);
      if (opts.c_in_register) sink(AccessRecord{c_addr, AccessKind::Read});
      for (std::uint32_t k = 0; k < side; ++k) {
        sink(AccessRecord{addr(base.a, y, k), AccessKind::Read});
        sink(AccessRecord{addr(base.b, k, x), AccessKind::Read});
        if (!opts.c_in_register) sink(AccessRecord{c_addr, AccessKind::Write});
      }
      if (opts.c_in_register) sink(AccessRecord{c_addr, AccessKind::Write});
    }
  }
}

std::vector<AccessRecord> materialize_trace(CurveOrder order, LayoutKind layout,
                                            RowRange rows, TraceOptions opts = {});

// Trace dump format: 9-byte records, 1 byte kind (0 read, 1 write) followed
// by the 8-byte little-endian address.
inline constexpr std::size_t kTraceRecordBytes = 9;

class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void operator()(AccessRecord r);
  std::uint64_t records() const { return records_; }

 private:
  std::ostream& out_;
  std::uint64_t records_ = 0;
};

std::vector<AccessRecord> read_trace(std::istream& in);

}  // namespace sfc
