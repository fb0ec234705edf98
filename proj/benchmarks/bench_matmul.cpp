#include <benchmark/benchmark.h>

#include "sfc/matrix.hpp"

namespace {

void BM_Matmul(benchmark::State& state) {
  const auto kind = static_cast<sfc::LayoutKind>(state.range(0));
  const sfc::CurveOrder order(static_cast<unsigned>(state.range(1)));
  const auto workers = static_cast<unsigned>(state.range(2));
  const auto a = sfc::random_matrix(order, kind, 1);
  const auto b = sfc::random_matrix(order, kind, 2);
  for (auto _ : state) {
    auto c = sfc::matmul(a, b, workers);
    benchmark::DoNotOptimize(c.data().data());
  }
  const double side = static_cast<double>(order.side());
  state.counters["flops"] =
      benchmark::Counter(2 * side * side * side, benchmark::Counter::kIsIterationInvariantRate);
  state.SetLabel(std::string(sfc::short_name(kind)));
}

}  // namespace

BENCHMARK(BM_Matmul)
    ->ArgsProduct({{0, 1, 2}, {6, 8}, {1}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();
