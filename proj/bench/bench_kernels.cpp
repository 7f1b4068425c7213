// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nlsnorm/kernels.hpp"
#include "nlsnorm/radial_grid.hpp"

namespace
{

using namespace nlsnorm;

struct Data
{
  GridPtr grid;
  std::vector<double> u, v, out;

  explicit Data(std::size_t n)
    : grid(RadialGrid::uniform(3, n, 40.0)), u(n), v(n), out(n)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      const double r = grid->nodes()[i];
      u[i] = std::exp(-r);
      v[i] = 1.0 / std::cosh(r / 2.0);
    }
  }
};

template <bool Parallel>
void BM_power_sum(benchmark::State &state)
{
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
  {
    double s = Parallel ? kernels::omp::power_sum(d.grid->weights(), d.u, 3.3)
                        : kernels::serial::power_sum(d.grid->weights(), d.u, 3.3);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_mixed_sum(benchmark::State &state)
{
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
  {
    double s = Parallel ? kernels::omp::mixed_sum(d.grid->weights(), d.u, d.v, 1.5, 2.5)
                        : kernels::serial::mixed_sum(d.grid->weights(), d.u, d.v, 1.5, 2.5);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_laplacian(benchmark::State &state)
{
  Data d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
  {
    if (Parallel)
    {
      kernels::omp::laplacian(d.grid->stencil(), d.u, d.out);
    }
    else
    {
      kernels::serial::laplacian(d.grid->stencil(), d.u, d.out);
    }
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_power_sum<false>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_power_sum<true>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_mixed_sum<false>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_mixed_sum<true>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_laplacian<false>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);
BENCHMARK(BM_laplacian<true>)->Arg(4096)->Arg(1 << 16)->Arg(1 << 19);

BENCHMARK_MAIN();
