// Serial vs OpenMP best-response scan on a 3-state quadratic problem.
#include <random>

#include <benchmark/benchmark.h>

#include "agentcap/kernels.hpp"
#include "agentcap/lattice.hpp"

namespace {

using namespace agentcap;

Scenario make_scenario(int m) {
    Scenario s;
    s.states.labels = {"L", "M", "H"};
    s.y.y = {0.0, 0.5, 1.0};
    s.cost.kind = CostKind::Quadratic;
    s.cost.Q = {1, 0, 0, 0, 1, 0, 0, 0, 1};
    s.cost.q0 = {0, 0, 0};
    s.capacity = 0.5;
    s.simplex_grid = m;
    return s;
}

struct Fixture {
    CandidateSet d;
    std::vector<double> u;
    std::size_t contracts;

    Fixture(int m, std::size_t c) : d(feasible_candidates(make_scenario(m))), contracts(c) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        u.resize(c * 3);
        for (double& v : u) v = unif(rng);
    }
};

void BM_serial(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        auto r = serial::scan_best_responses(f.d, f.u, f.contracts, 1e-9);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.contracts * f.d.size()));
}

void BM_omp(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) {
        auto r = omp::scan_best_responses(f.d, f.u, f.contracts, 1e-9);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(f.contracts * f.d.size()));
    state.counters["threads"] = thread_count();
}

} // namespace

BENCHMARK(BM_serial)->Args({40, 200})->Args({100, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_omp)->Args({40, 200})->Args({100, 1000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
