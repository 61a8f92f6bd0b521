#include <benchmark/benchmark.h>

#include <vector>

#include "presslab/cover.hpp"
#include "presslab/localent.hpp"
#include "presslab/systems.hpp"

using namespace presslab;

namespace {

struct AtomFixture {
    System sys = parse_system("circle:2|3");
    MultiPotential phi = random_potential(2, 1, 7, 0.5);
    TargetGrid grid;
    AtomRequest req;

    explicit AtomFixture(int n) {
        const double eps = 0.1;
        grid = build_target_grid(sys, n, eps, {});
        req.sys = &sys;
        req.phi = &phi;
        req.grid = &grid;
        for (const auto& w : all_words(2, n)) req.shapes.push_back({BallKind::Trajectory, w, n, 0});
        req.rule = WeightRule::WordSum;
        req.n = n;
        req.eps = eps;
    }
};

template <bool Parallel>
void BM_BuildAtoms(benchmark::State& state) {
    AtomFixture f(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto atoms = Parallel ? build_atoms_parallel(f.req) : build_atoms_serial(f.req);
        benchmark::DoNotOptimize(atoms.data());
    }
    state.counters["points"] = static_cast<double>(f.grid.size());
}
BENCHMARK(BM_BuildAtoms<false>)->Name("build_atoms/serial")->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildAtoms<true>)->Name("build_atoms/parallel")->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_BallMeasure(benchmark::State& state) {
    auto sys = parse_system("diag:2,3|3,2");
    auto mu = MeasureModel::lebesgue(2, 1 << 12);
    const int n = static_cast<int>(state.range(0));
    BallSpec ball{BallKind::Exhaustive, {}, n, {0.3, 0.6}, 0.25};
    for (auto _ : state) benchmark::DoNotOptimize(Parallel ? ball_measure_parallel(mu, sys, ball) : ball_measure(mu, sys, ball));
}
BENCHMARK(BM_BallMeasure<false>)->Name("ball_measure/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallMeasure<true>)->Name("ball_measure/parallel")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

template <bool Parallel>
void BM_LocalEntropies(benchmark::State& state) {
    auto sys = parse_system("circle:2|3");
    auto mu = MeasureModel::lebesgue(1, 1 << 16);
    auto xs = sample_points(mu, sys, static_cast<int>(state.range(0)), 3);
    const std::vector<int> ns{4, 6, 8};
    for (auto _ : state) {
        auto r = Parallel ? local_entropies_parallel(mu, sys, xs, 0.25, ns) : local_entropies_serial(mu, sys, xs, 0.25, ns);
        benchmark::DoNotOptimize(r.data());
    }
}
BENCHMARK(BM_LocalEntropies<false>)->Name("local_entropies/serial")->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LocalEntropies<true>)->Name("local_entropies/parallel")->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
