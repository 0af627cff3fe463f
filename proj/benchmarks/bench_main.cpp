#include <benchmark/benchmark.h>

#include "ackhold/netsim.hpp"
#include "ackhold/pacing_scheduler.hpp"
#include "ackhold/rtt_estimator.hpp"

namespace {

void BM_EstimatorUpdate(benchmark::State& state) {
    ackhold::RttEstimate e{1.0, 0.3};
    double x = 0.9;
    for (auto _ : state) {
        e = ackhold::update(e, x);
        x = e.rto() * 0.5;
        benchmark::DoNotOptimize(e);
    }
}
BENCHMARK(BM_EstimatorUpdate);

void BM_Phase1ClosedForm(benchmark::State& state) {
    for (auto _ : state) {
        auto r = ackhold::phase1_closed_form(static_cast<int>(state.range(0)),
                                             1.0, 0.3);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_Phase1ClosedForm)->Arg(5)->Arg(50);

void BM_OptimalSplit(benchmark::State& state) {
    ackhold::SchedulerInput in;
    in.total_acks_N = static_cast<int>(state.range(0));
    in.outage_T = 1000.0;
    in.mu0 = 1.0;
    in.sigma0 = 0.3;
    for (auto _ : state) {
        int n = ackhold::optimal_split(in);
        benchmark::DoNotOptimize(n);
    }
}
BENCHMARK(BM_OptimalSplit)->Arg(30)->Arg(100);

void BM_BuildSchedule(benchmark::State& state) {
    ackhold::SchedulerInput in;
    in.total_acks_N = static_cast<int>(state.range(0));
    in.outage_T = 1000.0;
    in.mu0 = 1.0;
    in.sigma0 = 0.3;
    for (auto _ : state) {
        auto s = ackhold::build_schedule(in);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_BuildSchedule)->Arg(20)->Arg(100);

void BM_FadeTransfer(benchmark::State& state) {
    ackhold::Scenario sc;
    sc.transfer_duration = static_cast<double>(state.range(0));
    sc.fade_windows = {{sc.transfer_duration * 0.375,
                        sc.transfer_duration * 0.25}};
    for (auto _ : state) {
        auto m = ackhold::run(sc);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_FadeTransfer)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
