#include <benchmark/benchmark.h>

#include <random>

#include "scda/kernels.hpp"

using namespace scda;

namespace {

std::vector<std::string> make_elements(std::size_t n, std::size_t bytes) {
  std::mt19937_64 rng(1);
  std::vector<std::string> out(n);
  for (auto& e : out) {
    e.resize(bytes);
    // Compressible but not trivial: short runs over a small alphabet.
    for (auto& c : e) c = static_cast<char>('a' + rng() % 6);
  }
  return out;
}

template <bool Parallel>
void compress(benchmark::State& state) {
  const auto elements = make_elements(static_cast<std::size_t>(state.range(0)), 4096);
  const std::vector<std::string_view> views(elements.begin(), elements.end());
  for (auto _ : state) {
    auto out = Parallel ? compress_elements(views, LineStyle::Unix, kBestLevel)
                        : compress_elements_serial(views, LineStyle::Unix, kBestLevel);
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 4096);
}

template <bool Parallel>
void decompress(benchmark::State& state) {
  const auto elements = make_elements(static_cast<std::size_t>(state.range(0)), 4096);
  const std::vector<std::string_view> views(elements.begin(), elements.end());
  std::vector<std::string> armored;
  for (auto& c : compress_elements(views, LineStyle::Unix, kBestLevel)) armored.push_back(std::move(c.armored));
  const std::vector<std::string_view> in(armored.begin(), armored.end());
  for (auto _ : state) {
    auto out = Parallel ? decompress_elements(in) : decompress_elements_serial(in);
    benchmark::DoNotOptimize(out);
  }
  state.SetBytesProcessed(state.iterations() * state.range(0) * 4096);
}

}  // namespace

BENCHMARK(compress<false>)->Name("compress/serial")->Arg(16)->Arg(256)->UseRealTime();
BENCHMARK(compress<true>)->Name("compress/openmp")->Arg(16)->Arg(256)->UseRealTime();
BENCHMARK(decompress<false>)->Name("decompress/serial")->Arg(16)->Arg(256)->UseRealTime();
BENCHMARK(decompress<true>)->Name("decompress/openmp")->Arg(16)->Arg(256)->UseRealTime();

BENCHMARK_MAIN();
