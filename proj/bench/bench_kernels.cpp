#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "mcns/kernels.hpp"

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  double acc = 0.0;
  for (double& x : v) x = acc += g(rng);
  return v;
}

std::vector<std::size_t> grid(std::size_t n, std::size_t l) {
  std::vector<std::size_t> c;
  for (std::size_t s = 0; s + l <= n; s += l) c.push_back(s);
  return c;
}

template <auto Fn>
void BM_snippet_profiles(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::size_t l = 64;
  const auto x = walk(n, 1);
  const auto c = grid(n, l);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(x, l, c, 0.05));
}

template <auto Fn>
void BM_distance_profile(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = walk(n, 2);
  const std::vector<double> q(x.begin() + 100, x.begin() + 164);
  for (auto _ : state) benchmark::DoNotOptimize(Fn(q, x));
}

template <auto Fn>
void BM_nearest_centroid(benchmark::State& state) {
  const auto items_n = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<double>> items, centroids;
  for (std::size_t i = 0; i < items_n; ++i) items.push_back(walk(64, 10 + i));
  for (std::size_t k = 0; k < 5; ++k) centroids.push_back(walk(64, 1000 + k));
  for (auto _ : state) benchmark::DoNotOptimize(Fn(items, centroids));
}

}  // namespace

BENCHMARK(BM_snippet_profiles<mcns::kernels::serial::snippet_profiles>)->Name("snippet_profiles/serial")->Arg(1024)->Arg(4096);
BENCHMARK(BM_snippet_profiles<mcns::kernels::parallel::snippet_profiles>)->Name("snippet_profiles/parallel")->Arg(1024)->Arg(4096);
BENCHMARK(BM_distance_profile<mcns::kernels::serial::distance_profile>)->Name("distance_profile/serial")->Arg(4096)->Arg(65536);
BENCHMARK(BM_distance_profile<mcns::kernels::parallel::distance_profile>)->Name("distance_profile/parallel")->Arg(4096)->Arg(65536);
BENCHMARK(BM_nearest_centroid<mcns::kernels::serial::nearest_centroid>)->Name("nearest_centroid/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_nearest_centroid<mcns::kernels::parallel::nearest_centroid>)->Name("nearest_centroid/parallel")->Arg(256)->Arg(2048);

BENCHMARK_MAIN();
