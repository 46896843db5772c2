#include <benchmark/benchmark.h>

#include "riskshare/economy.hpp"
#include "riskshare/envelope.hpp"
#include "riskshare/nudge.hpp"
#include "riskshare/numeric.hpp"
#include "riskshare/welfare.hpp"

using namespace riskshare;

namespace {

Economy baseline(double alpha) {
    return Economy{Weighting::prelec(alpha), Utility::cara(0.5),
                   {Utility::cara(0.5), Utility::cara(2.0)},
                   no_side_payment_weights(0.5, 2.0), 0.0};
}

void BM_BuildEnvelopePrelec(benchmark::State& state) {
    const double alpha = state.range(0) / 10.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_envelope(Weighting::prelec(alpha)));
    }
}
BENCHMARK(BM_BuildEnvelopePrelec)->Arg(4)->Arg(8)->Arg(20);

void BM_ConjugateHull(benchmark::State& state) {
    const Weighting w = Weighting::prelec(0.8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conjugate_hull(w, static_cast<int>(state.range(0))));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ConjugateHull)->Range(1 << 10, 1 << 16)->Complexity();

void BM_AllocationTable(benchmark::State& state) {
    const Economy econ = baseline(0.8);
    const Envelope env = build_envelope(econ.rdu_weighting);
    const Allocation alloc = solve_allocation(econ, env);
    const auto grid = numeric::midpoint_grid(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        double acc = 0.0;
        for (double t : grid) acc += alloc.payoff(0, t);
        benchmark::DoNotOptimize(acc);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllocationTable)->Range(256, 1 << 14)->Complexity();

void BM_CertaintyEquivalent(benchmark::State& state) {
    const Economy econ = baseline(0.8);
    const Envelope env = build_envelope(econ.rdu_weighting);
    const Allocation alloc = solve_allocation(econ, env);
    const MixedLaw law = MixedLaw::from_allocation(alloc, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            ce_rdu(law, econ.rdu_utility, econ.rdu_weighting));
    }
}
BENCHMARK(BM_CertaintyEquivalent);

void BM_PlannerValue(benchmark::State& state) {
    NudgeConfig cfg;
    cfg.k = 20.0;
    cfg.weighting = Weighting::prelec(0.4);
    cfg.rdu_utility = Utility::cara(0.5);
    cfg.eu_utility = Utility::cara(0.4);
    cfg.endowment = 1.0;
    const Envelope env = build_envelope(cfg.weighting);
    for (auto _ : state) {
        benchmark::DoNotOptimize(planner_value(cfg, env, 0.05));
    }
}
BENCHMARK(BM_PlannerValue);

}  // namespace

BENCHMARK_MAIN();
