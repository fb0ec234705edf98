#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "sfc/trace.hpp"
#include "support/oracles.hpp"

using namespace sfc;

TEST(Trace, PerStepLengths) {
  const TraceOptions per_k{false};
  EXPECT_EQ(materialize_trace(CurveOrder(1), LayoutKind::RowMajor, {0, 2}, per_k).size(), 24U);
  for (LayoutKind k : kAllLayouts) {
    EXPECT_EQ(materialize_trace(CurveOrder(2), k, {1, 2}, per_k).size(), 48U);
  }
  EXPECT_EQ(trace_length(CurveOrder(2), {1, 2}, per_k), 48U);
}

TEST(Trace, RegisterAccumulatorLengths) {
  // Per (i, j): one C read, 2 * side operand reads, one C write.
  EXPECT_EQ(materialize_trace(CurveOrder(2), LayoutKind::Morton, {1, 2}).size(), 4U * (2 * 4 + 2));
  for (unsigned n = 1; n <= 4; ++n) {
    const CurveOrder order(n);
    for (bool reg : {true, false}) {
      const RowRange rows = middle_rows(order, 3);
      EXPECT_EQ(materialize_trace(order, LayoutKind::Hilbert, rows, {reg}).size(),
                trace_length(order, rows, {reg}));
    }
  }
}

TEST(Trace, EmptyRangeIsEmpty) {
  EXPECT_TRUE(materialize_trace(CurveOrder(3), LayoutKind::RowMajor, {2, 2}).empty());
  EXPECT_EQ(trace_length(CurveOrder(3), {2, 2}), 0U);
  EXPECT_THROW(materialize_trace(CurveOrder(2), LayoutKind::RowMajor, {0, 5}), std::out_of_range);
}

TEST(Trace, FirstRecordReadsABase) {
  for (LayoutKind k : kAllLayouts) {
    const auto t = materialize_trace(CurveOrder(3), k, all_rows(CurveOrder(3)), {false});
    ASSERT_FALSE(t.empty());
    EXPECT_EQ(t.front(), (AccessRecord{operand_bases(CurveOrder(3)).a, AccessKind::Read}));
  }
}

TEST(Trace, BasesAreAlignedAndDisjoint) {
  for (unsigned n = 1; n <= 10; ++n) {
    const auto b = operand_bases(CurveOrder(n));
    EXPECT_EQ(b.a, 0U);
    EXPECT_EQ(b.b % 64, 0U);
    EXPECT_EQ(b.c % 64, 0U);
    EXPECT_GE(b.b, 8 * CurveOrder(n).cells());
    EXPECT_GE(b.c - b.b, 8 * CurveOrder(n).cells());
  }
}

TEST(Trace, FollowsLoopNest) {
  const CurveOrder order(2);
  const auto base = operand_bases(order);
  for (LayoutKind k : kAllLayouts) {
    const auto t = materialize_trace(order, k, {1, 3}, {true});
    std::size_t pos = 0;
    for (std::uint32_t y = 1; y < 3; ++y) {
      for (std::uint32_t x = 0; x < 4; ++x) {
        const std::uint64_t c = base.c + 8 * oracle::encode(k, y, x, 2);
        ASSERT_EQ(t[pos++], (AccessRecord{c, AccessKind::Read}));
        for (std::uint32_t kk = 0; kk < 4; ++kk) {
          ASSERT_EQ(t[pos++], (AccessRecord{base.a + 8 * oracle::encode(k, y, kk, 2), AccessKind::Read}));
          ASSERT_EQ(t[pos++], (AccessRecord{base.b + 8 * oracle::encode(k, kk, x, 2), AccessKind::Read}));
        }
        ASSERT_EQ(t[pos++], (AccessRecord{c, AccessKind::Write}));
      }
    }
    EXPECT_EQ(pos, t.size());
  }
}

TEST(Trace, TouchesEveryOperandElement) {
  const CurveOrder order(3);
  for (LayoutKind k : kAllLayouts) {
    std::set<std::uint64_t> addrs;
    for (const auto& r : materialize_trace(order, k, all_rows(order))) addrs.insert(r.address);
    EXPECT_EQ(addrs.size(), 3 * order.cells());
  }
}

TEST(Trace, Deterministic) {
  for (LayoutKind k : kAllLayouts) {
    EXPECT_EQ(materialize_trace(CurveOrder(4), k, middle_rows(CurveOrder(4), 5)),
              materialize_trace(CurveOrder(4), k, middle_rows(CurveOrder(4), 5)));
  }
}

TEST(Trace, MiddleRows) {
  const RowRange r = middle_rows(CurveOrder(8), 5);
  EXPECT_EQ(r.begin, 126U);
  EXPECT_EQ(r.end, 131U);
  const RowRange clamp = middle_rows(CurveOrder(1), 5);
  EXPECT_EQ(clamp.begin, 0U);
  EXPECT_EQ(clamp.end, 2U);
  EXPECT_EQ(all_rows(CurveOrder(3)).size(), 8U);
}

TEST(Trace, DumpRoundTrip) {
  const auto t = materialize_trace(CurveOrder(3), LayoutKind::Hilbert, {2, 4}, {false});
  std::stringstream buf;
  TraceWriter w(buf);
  for (const auto& r : t) w(r);
  EXPECT_EQ(w.records(), t.size());
  EXPECT_EQ(buf.str().size(), t.size() * kTraceRecordBytes);
  EXPECT_EQ(read_trace(buf), t);
}

TEST(Trace, DumpByteLayout) {
  std::stringstream buf;
  TraceWriter w(buf);
  w(AccessRecord{0x0102030405060708ULL, AccessKind::Write});
  const std::string s = buf.str();
  ASSERT_EQ(s.size(), 9U);
  EXPECT_EQ(s[0], 1);
  EXPECT_EQ(s[1], 0x08);
  EXPECT_EQ(s[8], 0x01);
}
