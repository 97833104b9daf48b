#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "wheelftc/controller.hpp"
#include "wheelftc/engine.hpp"
#include "wheelftc/kinematics.hpp"
#include "wheelftc/metrics.hpp"

using namespace wheelftc;

static void BM_CommandMapping(benchmark::State& state) {
    CommandMapper mapper{RobotGeometry{}};
    double t = 0.0;
    for (auto _ : state) {
        const BaseCommand cmd{0.36 * std::cos(t), 0.1 * std::sin(t)};
        benchmark::DoNotOptimize(mapper.map(cmd, 0.001));
        t += 0.001;
    }
}
BENCHMARK(BM_CommandMapping);

static void BM_AdaptiveUpdate(benchmark::State& state) {
    const ControllerGains g;
    double psi = 1.0;
    for (auto _ : state) {
        psi = adaptive_update(psi, 0.36, 0.35, g, 1e-9);
        benchmark::DoNotOptimize(psi);
    }
}
BENCHMARK(BM_AdaptiveUpdate);

static void BM_Simulate(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.sim.duration = static_cast<double>(state.range(0));
    cfg.environment.noise_amp = 5.0;
    cfg.command = CommandProfile({{0.0, 0.0, 0.0}, {3.0, 0.36, 0.0}, {10.0, 0.36, 0.1}});
    cfg.faults = FaultSchedule({{FaultTarget::FR, Channel::Actuator, 5.0, 8.0, {0.5, 0.0, 0.0, Channel::Actuator}}});
    for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.sim.tick_count()));
}
BENCHMARK(BM_Simulate)->Arg(20)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_EnvelopeFit(benchmark::State& state) {
    Series s;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        const double t = static_cast<double>(i) * 0.001;
        s.t.push_back(t);
        s.value.push_back(1.5 * std::exp(-2.0 * t) * jitter(rng) + 0.01 * jitter(rng));
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_exponential_envelope(s, 0.0));
}
BENCHMARK(BM_EnvelopeFit)->Arg(20001)->Arg(240001)->Unit(benchmark::kMillisecond);

static void BM_RunScenario(benchmark::State& state) {
    ScenarioConfig cfg;
    cfg.sim.duration = 20.0;
    cfg.command = CommandProfile({{0.0, 0.36, 0.0}});
    for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
}
BENCHMARK(BM_RunScenario)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
