#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "sfc/codec.hpp"

namespace {

std::vector<sfc::Coord2> coords(unsigned bits) {
  std::mt19937 rng(1);
  const std::uint32_t mask = (std::uint32_t{1} << bits) - 1;
  std::vector<sfc::Coord2> out(4096);
  for (auto& c : out) c = {static_cast<std::uint32_t>(rng()) & mask, static_cast<std::uint32_t>(rng()) & mask};
  return out;
}

void BM_Encode(benchmark::State& state) {
  const auto kind = static_cast<sfc::LayoutKind>(state.range(0));
  const auto bits = static_cast<unsigned>(state.range(1));
  const auto in = coords(bits);
  for (auto _ : state) {
    std::uint64_t acc = 0;
    for (const auto& c : in) acc += sfc::unchecked::encode(kind, c.y, c.x, bits);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * in.size()));
  state.SetLabel(std::string(sfc::short_name(kind)));
}

void BM_HilbertDecode(benchmark::State& state) {
  const auto bits = static_cast<unsigned>(state.range(0));
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> in(4096);
  for (auto& i : in) i = rng() & ((std::uint64_t{1} << (2 * bits)) - 1);
  for (auto _ : state) {
    std::uint64_t acc = 0;
    for (auto i : in) acc += sfc::unchecked::hilbert_inverse(i, bits).x;
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * in.size()));
}

}  // namespace

BENCHMARK(BM_Encode)->ArgsProduct({{0, 1, 2}, {8, 16, 31}});
BENCHMARK(BM_HilbertDecode)->Arg(8)->Arg(16)->Arg(31);
