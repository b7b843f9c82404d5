#include <benchmark/benchmark.h>

#include <random>

#include "gasp/kernel.hpp"
#include "gasp/preview.hpp"
#include "gasp/solver.hpp"
#include "gasp/splat_model.hpp"
#include "gasp/synth.hpp"

using namespace gasp;

static void BM_KernelWeights(benchmark::State& state) {
  const auto degree = static_cast<mpm::KernelDegree>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::vector<Vec3> pts(1024);
  for (auto& p : pts) p = Vec3(u(rng), u(rng), u(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mpm::kernel_weights(pts[i++ & 1023], Vec3::Zero(), 0.02, degree));
  }
}
BENCHMARK(BM_KernelWeights)->Arg(2)->Arg(3);

static void BM_TriangleToGauss(benchmark::State& state) {
  const GaussianScene s = synth::blob(1024, 1.0, 2);
  std::vector<SoupTriangle> tris;
  for (std::size_t i = 0; i < s.size(); ++i) tris.push_back(gauss_to_triangle(s.gaussians[i], i));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(triangle_to_gauss(tris[i++ & 1023]));
}
BENCHMARK(BM_TriangleToGauss);

static void BM_SolverStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  mpm::MaterialParams m;
  m.name = "jelly";
  const double h = 1.0 / 63.0;
  std::vector<mpm::Particle> ps;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        mpm::Particle p;
        p.x = Vec3(0.3, 0.3, 0.3) + 0.5 * h * Vec3(i, j, k);
        p.volume0 = 0.125 * h * h * h;
        p.mass = m.density * p.volume0;
        ps.push_back(p);
      }
  mpm::MpmSolver solver(mpm::SimGrid(Vec3::Zero(), h, mpm::Vec3i::Constant(64)), {m}, ps,
                        mpm::SolverOptions{mpm::KernelDegree::cubic, 0.4, state.range(1) != 0});
  solver.set_acceleration([](const Vec3&) { return Vec3(0, 0, -9.8); });
  for (auto _ : state) solver.substep(1e-4);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ps.size()));
}
BENCHMARK(BM_SolverStep)->Args({16, 0})->Args({16, 1})->Args({32, 0})->Unit(benchmark::kMillisecond);

static void BM_RenderPreview(benchmark::State& state) {
  const GaussianScene s = synth::blob(static_cast<std::size_t>(state.range(0)), 0.8, 3);
  preview::PreviewCamera cam;
  for (auto _ : state) benchmark::DoNotOptimize(preview::render_preview(s, cam));
}
BENCHMARK(BM_RenderPreview)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
