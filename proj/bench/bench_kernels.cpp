// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS to vary the pool.

#include "ipm/kernels.hpp"
#include "ipm/rng.hpp"
#include "ipm/synthdata.hpp"

#include <benchmark/benchmark.h>

using namespace ipm;

namespace {

struct Fixture {
  Matrix items;
  Vector u;
  Matrix m;
  std::vector<IndexPair> pairs;
  Matrix r, s;
  Vector d, y;

  Fixture(Index n, Index dim, Index p) {
    Rng rng(42);
    items = Matrix(n, dim);
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < dim; ++k) items(i, k) = rng.uniform(-2.0, 2.0);
    u = Vector(dim);
    for (Index k = 0; k < dim; ++k) u(k) = rng.uniform(-1.0, 1.0);
    Matrix l(dim, dim);
    for (Index i = 0; i < dim; ++i)
      for (Index k = 0; k < dim; ++k) l(i, k) = rng.normal();
    m = l.transpose() * l;
    pairs = sample_comparisons(n, p, 7).pairs();
    r = Matrix(p, dim);
    s = Matrix(p, dim);
    for (Index k = 0; k < p; ++k) {
      r.row(k) = items.row(pairs[k].i) - items.row(pairs[k].j);
      s.row(k) = items.row(pairs[k].i) + items.row(pairs[k].j);
    }
    d = kernels::serial::squared_distances(items, u, m);
    y = Vector(p);
    for (Index k = 0; k < p; ++k) y(k) = rng.uniform01() < 0.5 ? -1.0 : 1.0;
  }
};

const Fixture& fixture(Index p) {
  static const Fixture small(400, 10, 5000), large(4000, 10, 200000);
  return p <= 5000 ? small : large;
}

#define IPM_BENCH_PAIR(name, call)                                           \
  void BM_serial_##name(benchmark::State& st) {                              \
    const Fixture& f = fixture(st.range(0));                                 \
    namespace k = kernels::serial;                                           \
    for (auto _ : st) benchmark::DoNotOptimize(call);                        \
  }                                                                          \
  void BM_parallel_##name(benchmark::State& st) {                            \
    const Fixture& f = fixture(st.range(0));                                 \
    namespace k = kernels::parallel;                                         \
    for (auto _ : st) benchmark::DoNotOptimize(call);                        \
  }                                                                          \
  BENCHMARK(BM_serial_##name)->Arg(5000)->Arg(200000);                       \
  BENCHMARK(BM_parallel_##name)->Arg(5000)->Arg(200000);

IPM_BENCH_PAIR(squared_distances, k::squared_distances(f.items, f.u, f.m))
IPM_BENCH_PAIR(pair_differences, k::pair_differences(f.d, f.pairs))
IPM_BENCH_PAIR(quadratic_form_rows, k::quadratic_form_rows(f.s, f.r, f.m))
IPM_BENCH_PAIR(hinge_sum, k::hinge_sum(f.y, k::pair_differences(f.d, f.pairs)))
IPM_BENCH_PAIR(metric_design_rows, k::metric_design_rows(f.items, f.pairs))
IPM_BENCH_PAIR(bilinear_design_rows, k::bilinear_design_rows(f.r, f.u))

}  // namespace

BENCHMARK_MAIN();
