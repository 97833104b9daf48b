#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wheelftc/faults.hpp"
#include "wheelftc/metrics.hpp"
#include "wheelftc/scenario.hpp"
#include "wheelftc/telemetry.hpp"

namespace wheelftc {

struct RunOptions {
    /// Skip the fault channels entirely: measurement = state, valve = command.
    bool bypass_faults = false;
};

struct NonOperableInterval {
    FaultTarget target = FaultTarget::FR;
    Channel channel = Channel::Sensor;
    double t_start = 0.0;
    double t_end = 0.0;
    FaultStatus status = FaultStatus::Healthy;
};

struct RunSummary {
    std::string scenario;
    double dt = 0.0;
    double duration = 0.0;
    std::uint64_t seed = 0;
    std::size_t ticks = 0;
    SummaryMetrics metrics;
    std::vector<NonOperableInterval> non_operable;
    bool operations_halted = false;  // any stuck or no-signal window occurred
    EnvelopeFit envelope;
    LyapunovDiagnostics lyapunov;
};

struct RunResult {
    Telemetry telemetry;
    RunSummary summary;
};

/// Closed loop at a fixed rate. Each tick at t = n dt: base command, inverse
/// kinematics, sensor faults on the start-of-tick state, control laws, actuator
/// faults, adaptive update, plant integration under held valve inputs, row emit.
/// Throws NumericError if a state goes non-finite.
Telemetry simulate(const ScenarioConfig& cfg, const RunOptions& options = {});

/// simulate() plus the summary.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {});

/// Intervals covered by stuck or no-signal faults, with start and end taken
/// from the telemetry ticks (end = first tick after the window).
std::vector<NonOperableInterval> detect_non_operable(const Telemetry& telemetry, const FaultSchedule& schedule);

/// Flat key=value text.
void write_summary(std::ostream& out, const RunSummary& summary);

/// t, error norm, V.
void write_diagnostics_csv(std::ostream& out, const Series& error_norm, const Series& v_series);

}  // namespace wheelftc
