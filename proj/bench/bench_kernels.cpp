// Serial reference vs OpenMP kernels: one simulator step and one exponent
// grid scan. Set OMP_NUM_THREADS to compare thread counts.

#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <vector>

#include "attn/fitting.hpp"
#include "attn/simulator.hpp"

namespace {

attn::SimConfig bench_config(std::int64_t users) {
  attn::SimConfig cfg = attn::reference_sim_config(7);
  cfg.n_users = users;
  for (auto& [q, p] : cfg.class_params) p.N = users;
  return cfg;
}

template <void (*Step)(attn::SimState&, const attn::SimConfig&)>
void BM_SimStep(benchmark::State& st) {
  const auto cfg = bench_config(st.range(0));
  const attn::SimState initial = attn::init_population(cfg);
  for (auto _ : st) {
    st.PauseTiming();
    attn::SimState s = initial;
    st.ResumeTiming();
    Step(s, cfg);
    benchmark::DoNotOptimize(s.followers.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// Least-squares objective of the gain fit over n samples.
struct GainObjective {
  std::vector<double> r, m, y;

  explicit GainObjective(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      r.push_back(std::exp(5.3 * u));
      m.push_back(std::exp(3.9 * std::fmod(7.0 * u, 1.0)));
      y.push_back(0.00215 * std::pow(r.back(), 0.634) + 0.00038 * std::pow(m.back(), 0.865));
    }
  }

  double operator()(std::span<const double> e) const {
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double res = y[i] - 0.00215 * std::pow(r[i], e[0]) - 0.00038 * std::pow(m[i], e[1]);
      sse += res * res;
    }
    return sse;
  }
};

template <attn::GridBest (*Scan)(std::span<const attn::GridAxis>,
                                 const std::function<double(std::span<const double>)>&)>
void BM_GridScan(benchmark::State& st) {
  const GainObjective objective(static_cast<std::size_t>(st.range(0)));
  const std::array<attn::GridAxis, 2> axes{attn::GridAxis{0.0, 2.0, attn::kGridStep},
                                           attn::GridAxis{0.0, 2.0, attn::kGridStep}};
  const std::function<double(std::span<const double>)> fn = objective;
  for (auto _ : st) benchmark::DoNotOptimize(Scan(axes, fn));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(axes[0].size() * axes[1].size()));
}

}  // namespace

BENCHMARK(BM_SimStep<attn::step_serial>)->Name("sim_step/serial")->Arg(2000)->Arg(20000);
BENCHMARK(BM_SimStep<attn::step>)->Name("sim_step/openmp")->Arg(2000)->Arg(20000);
BENCHMARK(BM_GridScan<attn::scan_grid_serial>)->Name("grid_scan/serial")->Arg(500)->Arg(2000);
BENCHMARK(BM_GridScan<attn::scan_grid>)->Name("grid_scan/openmp")->Arg(500)->Arg(2000);

BENCHMARK_MAIN();
