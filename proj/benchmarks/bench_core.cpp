#include <benchmark/benchmark.h>

#include "micromorph/assembly.hpp"
#include "micromorph/extension.hpp"
#include "micromorph/static_solver.hpp"

using namespace micromorph;

namespace {

Mesh make_mesh(int n) { return build_box_mesh({1.0, 1.0, 1.0, n, n, n}); }

void BM_BuildBoxMesh(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Mesh mesh = make_mesh(n);
    benchmark::DoNotOptimize(mesh.n_edges());
  }
}
BENCHMARK(BM_BuildBoxMesh)->Arg(4)->Arg(8);

void BM_AssembleMicromorphic(benchmark::State& state) {
  const Mesh mesh = make_mesh(static_cast<int>(state.range(0)));
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams params;
  for (auto _ : state) {
    SparseMatrix k = assemble_micromorphic(params, vu, vp);
    benchmark::DoNotOptimize(k.nnz());
  }
}
BENCHMARK(BM_AssembleMicromorphic)->Arg(2)->Arg(4)->Arg(6);

void BM_SparseMatVec(benchmark::State& state) {
  const Mesh mesh = make_mesh(static_cast<int>(state.range(0)));
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const SparseMatrix k = assemble_micromorphic(MaterialParams{}, vu, vp);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(k.cols());
  for (auto _ : state) {
    Eigen::VectorXd y = k.apply(x);
    benchmark::DoNotOptimize(y.sum());
  }
}
BENCHMARK(BM_SparseMatVec)->Arg(4)->Arg(8);

void BM_StaticHomogeneousSolve(benchmark::State& state) {
  const Mesh mesh = make_mesh(static_cast<int>(state.range(0)));
  const H1VectorSpace vu = make_h1_vector(mesh, 1);
  const HcurlSpace vp = make_hcurl(mesh);
  const MaterialParams params;
  const VectorField f = [](const Vec3& x) { return Vec3(1.0, x.x(), -x.y()); };
  for (auto _ : state) {
    StaticSolution sol = solve_static_homogeneous(params, vu, vp, f, nullptr);
    benchmark::DoNotOptimize(sol.energy);
  }
}
BENCHMARK(BM_StaticHomogeneousSolve)->Arg(2)->Arg(3);

void BM_DirectLifting(benchmark::State& state) {
  const Mesh mesh = make_mesh(static_cast<int>(state.range(0)));
  const HcurlSpace vp = make_hcurl(mesh);
  const TangentialLifter lifter(vp);
  const Eigen::VectorXd coeffs =
      interpolate_hcurl(vp, [](const Vec3& x) { return Vec3(-x.y(), x.x(), 1.0); });
  const TangentialTraceData g = tangential_trace(vp, coeffs);
  for (auto _ : state) {
    Eigen::VectorXd lifted = lifter.lift(g);
    benchmark::DoNotOptimize(lifted.norm());
  }
}
BENCHMARK(BM_DirectLifting)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
