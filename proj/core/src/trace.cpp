#include "sfc/trace.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <ostream>

namespace sfc {

RowRange all_rows(CurveOrder order) {
  return RowRange{0, static_cast<std::uint32_t>(order.side())};
}

RowRange middle_rows(CurveOrder order, std::uint32_t count) {
  const auto side = static_cast<std::uint32_t>(order.side());
  count = std::min(count, side);
  const std::uint32_t begin = side / 2 - std::min(side / 2, count / 2);
  return RowRange{begin, std::min(side, begin + count)};
}

OperandBases operand_bases(CurveOrder order) {
  const std::uint64_t bytes = 8 * order.cells();
  const std::uint64_t region = (bytes + 63) & ~std::uint64_t{63};
  return OperandBases{0, region, 2 * region};
}

std::uint64_t trace_length(CurveOrder order, RowRange rows, TraceOptions opts) {
  const std::uint64_t pairs = std::uint64_t{rows.size()} * order.side();
  return opts.c_in_register ? pairs * (2 * order.side() + 2)
                            : pairs * order.side() * 3;
}

std::vector<AccessRecord> materialize_trace(CurveOrder order, LayoutKind layout,
                                            RowRange rows, TraceOptions opts) {
  std::vector<AccessRecord> out;
  out.reserve(trace_length(order, rows, opts));
  matmul_trace(order, layout, rows, opts, [&](AccessRecord r) { out.push_back(r); });
  return out;
}

void TraceWriter::operator()(AccessRecord r) {
  std::array<char, kTraceRecordBytes> buf{};
  buf[0] = static_cast<char>(r.kind);
  for (int i = 0; i < 8; ++i) {
    buf[1 + i] = static_cast<char>((r.address >> (8 * i)) & 0xFF);
  }
  out_.write(buf.data(), buf.size());
  ++records_;
}

std::vector<AccessRecord> read_trace(std::istream& in) {
  std::vector<AccessRecord> out;
  std::array<unsigned char, kTraceRecordBytes> buf{};
  while (in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    if (buf[0] > 1) throw std::runtime_error("bad trace record kind");
    AccessRecord r;
    r.kind = static_cast<AccessKind>(buf[0]);
    for (int i = 0; i < 8; ++i) r.address |= std::uint64_t{buf[1 + i]} << (8 * i);
    out.push_back(r);
  }
  if (in.gcount() != 0) throw std::runtime_error("truncated trace record");
  return out;
}

}  // namespace sfc
