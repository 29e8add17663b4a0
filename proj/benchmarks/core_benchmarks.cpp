// Microbenchmarks for the hot paths: spectral multipliers, the connection
// assembly, one solver step, and the direct spin-equation oracle step.

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>
#include <memory>
#include <random>

#include "spinfield/dsii.hpp"
#include "spinfield/reconstruction.hpp"

using namespace spinfield;

namespace {

struct Fixture {
    std::unique_ptr<SpectralWorkspace> ws;
    ScalarField f;
    PsiState psi;
    SpinField spin;

    explicit Fixture(int n) {
        const double L = 16.0 * M_PI;
        ws = std::make_unique<SpectralWorkspace>(Grid{n, n, L, L});
        std::mt19937_64 rng(42);
        std::normal_distribution<double> gauss(0.0, 1.0);
        f = ScalarField(ws->grid());
        for (auto& v : f.v) v = 0.1 * Complex{gauss(rng), gauss(rng)};
        f = ws->dealias(f);

        BumpParams p;
        p.amplitude = 0.2;
        p.wave1 = 1;
        spin = bump_map(ws->grid(), Signature{1, 1}, p);
        const GaugeData gd = coulomb_gauge(*ws, spin);
        psi = PsiState{gd.phi, 0.0};
    }
};

Fixture& fixture(int n) {
    static std::map<int, std::unique_ptr<Fixture>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Fixture>(n);
    return *slot;
}

void BM_ForwardFft(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fx.ws->forward(fx.f));
}

void BM_Riesz(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fx.ws->riesz(1, fx.f));
}

void BM_DealiasedProduct(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fx.ws->product(fx.f, fx.f));
}

void BM_Connection(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(connection_from_psi(*fx.ws, fx.psi));
}

void BM_SolverStep(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    SolverConfig cfg;
    cfg.dt = 1e-3;
    for (auto _ : state) benchmark::DoNotOptimize(step(*fx.ws, fx.psi, cfg));
}

void BM_DsiiStep(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    DsiiState phi;
    phi.phi = fx.f;
    phi.mu = 1;
    SolverConfig cfg;
    cfg.dt = 1e-3;
    cfg.T = 1e-3;
    cfg.snapshot_stride = 1;
    for (auto _ : state) benchmark::DoNotOptimize(solve_dsii(*fx.ws, phi, cfg));
}

void BM_DirectSpinStep(benchmark::State& state) {
    Fixture& fx = fixture(int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(direct_spin_step(*fx.ws, fx.spin, 1e-3));
}

BENCHMARK(BM_ForwardFft)->Arg(64)->Arg(128);
BENCHMARK(BM_Riesz)->Arg(64)->Arg(128);
BENCHMARK(BM_DealiasedProduct)->Arg(64)->Arg(128);
BENCHMARK(BM_Connection)->Arg(64)->Arg(128);
BENCHMARK(BM_SolverStep)->Arg(64)->Arg(128);
BENCHMARK(BM_DsiiStep)->Arg(64)->Arg(128);
BENCHMARK(BM_DirectSpinStep)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
