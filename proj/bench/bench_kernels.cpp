// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <random>

#include "freqlab/frequency.hpp"
#include "freqlab/norms.hpp"

using namespace freqlab;

namespace {

Grid square(std::size_t n) { return build_grid(Domain::rectangle({0, 1}, {0, 1}), {n, n}); }

Field noise(const Grid& g) {
    std::mt19937_64 gen(1);
    return g.sample_dirichlet([&](const Point&) { return uniform(gen, -1.0, 1.0); });
}

const SolutionTrajectory& trajectory() {
    static const SolutionTrajectory tr = [] {
        const Grid g = square(65);
        InitialData d;
        d.kind = InitialData::Kind::FourierRandom;
        const TimeGrid t = TimeGrid::make(0.05, 64);
        return solve_trajectory(g, t, CoefficientField::fourier_random(g, t, 1, 1.0), make_initial_field(g, d));
    }();
    return tr;
}

template <bool Parallel>
void BM_Laplacian(benchmark::State& state) {
    const Grid g = square(static_cast<std::size_t>(state.range(0)));
    const Field u = noise(g);
    for (auto _ : state) {
        Field out = Parallel ? apply_laplacian(g, u) : serial::apply_laplacian(g, u);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(g.node_count()));
}

template <bool Parallel>
void BM_FrequencyTrace(benchmark::State& state) {
    const auto& tr = trajectory();
    const auto w = CaloricWeight::make(0.01, {0.4, 0.6}, tr.time.T, 2);
    for (auto _ : state) {
        auto f = Parallel ? compute_trace(tr, w, 1.0) : serial::compute_trace(tr, w, 1.0);
        benchmark::DoNotOptimize(f.N.data());
    }
}

template <bool Parallel>
void BM_NormTrace(benchmark::State& state) {
    const auto& tr = trajectory();
    const DirichletLaplacian lap(tr.grid);
    for (auto _ : state) {
        auto n = Parallel ? compute_norm_trace(tr, lap) : serial::compute_norm_trace(tr, lap);
        benchmark::DoNotOptimize(n.zeta.data());
    }
}

}  // namespace

BENCHMARK(BM_Laplacian<true>)->Name("apply_laplacian/omp")->Arg(129)->Arg(513);
BENCHMARK(BM_Laplacian<false>)->Name("apply_laplacian/serial")->Arg(129)->Arg(513);
BENCHMARK(BM_FrequencyTrace<true>)->Name("compute_trace/omp");
BENCHMARK(BM_FrequencyTrace<false>)->Name("compute_trace/serial");
BENCHMARK(BM_NormTrace<true>)->Name("compute_norm_trace/omp");
BENCHMARK(BM_NormTrace<false>)->Name("compute_norm_trace/serial");

BENCHMARK_MAIN();
