#include <benchmark/benchmark.h>

#include <random>

#include "ibres/eigensolve.hpp"
#include "ibres/floquet_assembly.hpp"
#include "ibres/ibsim.hpp"
#include "ibres/special_functions.hpp"
#include "ibres/stability_sweep.hpp"

namespace {

using Complex = std::complex<double>;

const ibres::floquet::PhysicalParameters kCase1 = ibres::floquet::PhysicalParameters::from_kappa_nu(0.5, 0.004);

void BM_Hankel(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 40.0);
    std::vector<Complex> args(256);
    for (auto& a : args) a = Complex(u(rng), u(rng));
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ibres::special::hankel1(ibres::special::BesselOrder(3), args[k++ % args.size()]));
    }
}
BENCHMARK(BM_Hankel);

void BM_RatioTerms(benchmark::State& state) {
    // argument i Omega_n at moderate n, as in the pencil rows
    const Complex z = Complex(0.0, 1.0) * std::sqrt(Complex(0.0, 12.0) / 0.004);
    for (auto _ : state) benchmark::DoNotOptimize(ibres::special::ratio_terms(4.35, z));
}
BENCHMARK(BM_RatioTerms);

void BM_AssemblePencil(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ibres::floquet::assemble_pencil(2.0, ibres::floquet::FloquetClass::Harmonic, kCase1, n));
    }
}
BENCHMARK(BM_AssemblePencil)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_QzFullPencil(benchmark::State& state) {
    const auto pen = ibres::floquet::assemble_pencil(2.0, ibres::floquet::FloquetClass::Harmonic, kCase1,
                                                     static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ibres::eig::finite_eigenvalues(pen.a, pen.b));
}
BENCHMARK(BM_QzFullPencil)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ParityReducedSolve(benchmark::State& state) {
    const auto pen = ibres::floquet::assemble_pencil(2.0, ibres::floquet::FloquetClass::Harmonic, kCase1,
                                                     static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const auto red = ibres::floquet::reduce_parity(pen);
        benchmark::DoNotOptimize(ibres::eig::standard_eigenvalues(red.inverse_times_s()));
    }
}
BENCHMARK(BM_ParityReducedSolve)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_ConvergeTruncation(benchmark::State& state) {
    const ibres::sweep::SweepConfig config;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ibres::sweep::converge_truncation(2.0, ibres::floquet::FloquetClass::Harmonic, kCase1, config));
    }
}
BENCHMARK(BM_ConvergeTruncation)->Unit(benchmark::kMillisecond);

void BM_FluidStep(benchmark::State& state) {
    const int g = static_cast<int>(state.range(0));
    ibres::sim::FluidSolver fluid(g, 4.0, 2e-4);
    ibres::sim::GridField force(g);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1e-3);
    for (auto& v : force.x) v = n(rng);
    for (auto& v : force.y) v = n(rng);
    for (auto _ : state) fluid.step(force, 1e-3);
}
BENCHMARK(BM_FluidStep)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_SpreadInterpolate(benchmark::State& state) {
    const auto fiber = ibres::sim::perturbed_circle(256, 1.0, Eigen::Vector2d(2.0, 2.0), 3, 0.05);
    const ibres::sim::DeltaCoupling coupling(128, 4.0);
    const ibres::sim::ForcingSchedule schedule{0.02, 0.3};
    for (auto _ : state) {
        const auto force = ibres::sim::fiber_force(fiber.points, fiber.ds(), 0.5, schedule);
        const auto grid = coupling.spread(fiber.points, force, fiber.ds());
        benchmark::DoNotOptimize(coupling.interpolate(fiber.points, grid));
    }
}
BENCHMARK(BM_SpreadInterpolate)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
