#include <benchmark/benchmark.h>

#include <graphmask/inference.hpp>
#include <graphmask/inpaint.hpp>
#include <graphmask/qp.hpp>
#include <graphmask/synth.hpp>

using namespace graphmask;

namespace {

SynthInstance instance(int n) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.edge_quantile = std::min(1.0, 6.0 / (n - 1));
  cfg.seed = 1;
  return generate_instance(cfg);
}

void BM_MlReduced(benchmark::State& state) {
  const SynthInstance inst = instance(static_cast<int>(state.range(0)));
  MlConfig cfg;
  cfg.use_corrective = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ml(inst.layers, inst.signals, cfg));
}
BENCHMARK(BM_MlReduced)->Arg(20)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_MlFull(benchmark::State& state) {
  const SynthInstance inst = instance(static_cast<int>(state.range(0)));
  MlConfig cfg;
  cfg.gamma = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ml(inst.layers, inst.signals, cfg));
}
BENCHMARK(BM_MlFull)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_GlSigrep(benchmark::State& state) {
  const SynthInstance inst = instance(static_cast<int>(state.range(0)));
  const double gamma = auto_gamma(inst.signals, 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(solve_gl_sigrep(inst.signals, gamma, inst.layers.size()));
}
BENCHMARK(BM_GlSigrep)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_QpSimplex(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  QpProblem pr = QpProblem::with_variables(n);
  for (Eigen::Index i = 0; i < n; ++i) pr.q(i) = static_cast<double>((i * 37) % 11) - 5.0;
  pr.a = Matrix::Ones(1, n).sparseView();
  pr.b = Vector::Ones(1);
  pr.g = (-Matrix::Identity(n, n)).sparseView();
  pr.h = Vector::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve(pr));
}
BENCHMARK(BM_QpSimplex)->Arg(100)->Arg(1000);

void BM_Inpaint(benchmark::State& state) {
  const SynthInstance inst = instance(static_cast<int>(state.range(0)));
  const int n = inst.layers.size();
  const std::vector<int> observed = holdout_observed(n, {0.5, 3}, 0);
  Vector y(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t k = 0; k < observed.size(); ++k) y(static_cast<Eigen::Index>(k)) = inst.signals(observed[k], 0);
  const InpaintProblem p{inst.true_global.laplacian(), observed, y, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(inpaint_or_fill(p));
}
BENCHMARK(BM_Inpaint)->Arg(20)->Arg(80);

}  // namespace

BENCHMARK_MAIN();
