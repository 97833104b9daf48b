#include "wheelftc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "wheelftc/controller.hpp"
#include "wheelftc/error.hpp"
#include "wheelftc/kinematics.hpp"
#include "wheelftc/plant.hpp"

namespace wheelftc {

namespace {

constexpr const char* kWheelKeys[kWheelCount] = {"fr", "fl", "rr", "rl"};

// Independent unit-normal stream per noise source so that enabling one source
// never shifts the draws of another.
class NoiseStream {
public:
    NoiseStream(std::uint64_t seed, std::uint32_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
        engine_.seed(seq);
    }

    double draw() { return normal_(engine_); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct PlantBounds {
    double f_star = 0.0;
    double d_star = 0.0;
};

FaultTarget target_of_wheel(std::size_t w) { return static_cast<FaultTarget>(w); }
FaultTarget target_of_axle(std::size_t a) { return static_cast<FaultTarget>(kWheelCount + a); }

void check_finite(double v, std::size_t row, const char* what, std::size_t i) {
    if (!std::isfinite(v)) {
        throw NumericError(row, std::string(what) + "[" + std::to_string(i) + "] = " + format_number(v));
    }
}

Telemetry simulate_impl(const ScenarioConfig& cfg, const RunOptions& options, PlantBounds* bounds) {
    const auto& geom = cfg.geometry;
    const auto& plant = cfg.plant;
    const auto& gains = cfg.gains;
    const auto& sched = cfg.faults;
    const double dt = cfg.sim.dt;
    const double r = geom.wheel_radius;
    const std::size_t ticks = cfg.sim.tick_count();

    std::vector<NoiseStream> sensor_noise, actuator_noise, load_noise;
    for (std::uint32_t i = 0; i < kFaultTargetCount; ++i) {
        sensor_noise.emplace_back(cfg.sim.seed, 100 + i);
        actuator_noise.emplace_back(cfg.sim.seed, 200 + i);
    }
    for (std::uint32_t i = 0; i < kWheelCount; ++i) load_noise.emplace_back(cfg.sim.seed, 300 + i);

    CommandMapper mapper(geom);
    ControllerState ctrl = ControllerState::initial(gains);
    DriveState omega;
    SteeringState steer;
    DriveState omega_prev = omega;
    SteeringState steer_prev = steer;
    WheelArray v_cmd_prev{};
    const WheelArray a_bar = cfg.a_bar();

    Telemetry out;
    out.reserve(ticks);
    for (std::size_t n = 0; n < ticks; ++n) {
        const double t = static_cast<double>(n) * dt;
        TelemetryRow row;
        row.t = t;

        const BaseCommand base = command_profile_eval(cfg.command, t);
        const WheelCommandSet wc = mapper.map(base, dt);
        row.v_cmd = wc.v_cmd;
        row.phi_cmd = wc.phi_cmd;

        const DriveState& omega_seen = cfg.sim.sensor_delay ? omega_prev : omega;
        const SteeringState& steer_seen = cfg.sim.sensor_delay ? steer_prev : steer;

        std::array<FaultState, kWheelCount> actuator_faults{};
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            row.v_actual[w] = r * omega[w];
            double omega_meas = omega_seen[w];
            if (!options.bypass_faults) {
                const auto f = active_fault(sched, t, target_of_wheel(w), Channel::Sensor);
                omega_meas = apply_sensor_fault(omega_meas, f, sensor_noise[w].draw());
            }
            row.v_meas[w] = r * omega_meas;
        }
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            double phi_meas = steer_seen.phi[a];
            if (!options.bypass_faults) {
                const auto f = active_fault(sched, t, target_of_axle(a), Channel::Sensor);
                phi_meas = apply_sensor_fault(phi_meas, f, sensor_noise[kWheelCount + a].draw());
            }
            row.phi_meas[a] = phi_meas;
        }

        for (std::size_t w = 0; w < kWheelCount; ++w) {
            row.psi[w] = ctrl.psi[w];
            row.u_a[w] = drive_control(row.v_meas[w], row.v_cmd[w], ctrl.psi[w], gains);
        }
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            row.u_s[a] = steering_control(row.phi_cmd[a], row.phi_meas[a], gains);
        }

        AxleArray u_s_applied = row.u_s;
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            row.u_v[w] = row.u_a[w];
            if (!options.bypass_faults) {
                actuator_faults[w] = active_fault(sched, t, target_of_wheel(w), Channel::Actuator);
                row.u_v[w] = apply_actuator_fault(row.u_a[w], actuator_faults[w], actuator_noise[w].draw());
            }
        }
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            if (!options.bypass_faults) {
                const auto f = active_fault(sched, t, target_of_axle(a), Channel::Actuator);
                u_s_applied[a] = apply_actuator_fault(row.u_s[a], f, actuator_noise[kWheelCount + a].draw());
            }
        }

        for (std::size_t w = 0; w < kWheelCount; ++w) {
            ctrl.psi[w] = adaptive_update(ctrl.psi[w], row.v_cmd[w], row.v_meas[w], gains, dt);
        }

        WheelArray load{};
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            load[w] = cfg.environment.pulse_torque(w, t);
            if (cfg.environment.noise_amp > 0.0) {
                load[w] += cfg.environment.noise_amp * load_noise[w].draw();
            }
        }

        if (bounds != nullptr) {
            const double grade = cfg.environment.grade_at(t);
            for (std::size_t w = 0; w < kWheelCount; ++w) {
                const auto& fa = actuator_faults[w];
                const double f_term = -plant.damping * row.v_actual[w] / plant.inertia;
                const double v_cmd_rate = n == 0 ? 0.0 : (row.v_cmd[w] - v_cmd_prev[w]) / dt;
                const double d_term =
                    r / plant.inertia *
                        (plant.valve_gain * fa.epsilon * fa.sat - plant.coulomb * smooth_sign(omega[w]) -
                         gravity_torque(plant, r, grade) - load[w]) -
                    v_cmd_rate;
                bounds->f_star = std::max(bounds->f_star, std::abs(f_term / a_bar[w]));
                bounds->d_star = std::max(bounds->d_star, std::abs(d_term / a_bar[w]));
            }
        }

        omega_prev = omega;
        steer_prev = steer;
        v_cmd_prev = row.v_cmd;
        omega = advance_drive(omega, row.u_v, load, plant, cfg.environment, r, t, dt, cfg.sim.plant_substeps);
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            steer.phi[a] = integrate_steering(steer.phi[a], u_s_applied[a], plant, geom.steering_limit, dt);
        }

        for (std::size_t i = 0; i < kFaultTargetCount; ++i) {
            const auto target = static_cast<FaultTarget>(i);
            for (Channel ch : {Channel::Sensor, Channel::Actuator}) {
                if (const auto* e = sched.find(t, target, ch); e && is_non_operable(classify_fault(e->fault))) {
                    row.non_operable_mask |= 1u << i;
                }
            }
        }

        for (std::size_t w = 0; w < kWheelCount; ++w) {
            check_finite(omega[w], n, "omega", w);
            check_finite(row.v_meas[w], n, "v_meas", w);
            check_finite(row.u_v[w], n, "u_v", w);
            check_finite(ctrl.psi[w], n, "psi", w);
        }
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            check_finite(steer.phi[a], n, "phi", a);
            check_finite(row.phi_meas[a], n, "phi_meas", a);
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace

Telemetry simulate(const ScenarioConfig& cfg, const RunOptions& options) {
    return simulate_impl(cfg, options, nullptr);
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options) {
    PlantBounds bounds;
    RunResult result;
    result.telemetry = simulate_impl(cfg, options, &bounds);
    const auto& tel = result.telemetry;

    RunSummary& s = result.summary;
    s.scenario = cfg.name;
    s.dt = cfg.sim.dt;
    s.duration = cfg.sim.duration;
    s.seed = cfg.sim.seed;
    s.ticks = tel.size();
    s.metrics = summary_metrics(tel, cfg.metrics.fit_start);
    s.non_operable = detect_non_operable(tel, cfg.faults);
    s.operations_halted = !s.non_operable.empty();
    s.lyapunov.a_bar = cfg.a_bar();
    try {
        s.envelope = fit_exponential_envelope(error_norm_series(tel), cfg.metrics.fit_start);
        s.lyapunov = lyapunov_diagnostics(tel, cfg.a_bar(), cfg.metrics.fit_start);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Range) throw;
        // Too few samples for a fit; the envelope stays zeroed.
    }
    s.lyapunov.f_star = bounds.f_star;
    s.lyapunov.d_star = bounds.d_star;
    return result;
}

std::vector<NonOperableInterval> detect_non_operable(const Telemetry& telemetry, const FaultSchedule& schedule) {
    std::vector<NonOperableInterval> out;
    if (telemetry.empty()) return out;
    const double dt = telemetry.size() > 1 ? telemetry[1].t - telemetry[0].t : 0.0;
    for (const auto& e : schedule.entries()) {
        const auto status = classify_fault(e.fault);
        if (!is_non_operable(status)) continue;
        std::size_t first = telemetry.size();
        std::size_t last = 0;
        for (std::size_t i = 0; i < telemetry.size(); ++i) {
            const double t = telemetry[i].t;
            if (t >= e.t_start - kWindowSlack && t < e.t_end - kWindowSlack) {
                first = std::min(first, i);
                last = i;
            }
        }
        if (first == telemetry.size()) continue;
        const double end = last + 1 < telemetry.size() ? telemetry[last + 1].t : telemetry[last].t + dt;
        out.push_back({e.target, e.channel, telemetry[first].t, end, status});
    }
    std::sort(out.begin(), out.end(), [](const NonOperableInterval& a, const NonOperableInterval& b) {
        if (a.t_start != b.t_start) return a.t_start < b.t_start;
        return a.target < b.target;
    });
    return out;
}

void write_summary(std::ostream& out, const RunSummary& s) {
    auto kv = [&](const std::string& key, const std::string& value) { out << key << '=' << value << '\n'; };
    auto num = [&](const std::string& key, double value) { kv(key, format_number(value)); };
    kv("scenario", s.scenario);
    num("dt", s.dt);
    num("duration", s.duration);
    kv("seed", std::to_string(s.seed));
    kv("ticks", std::to_string(s.ticks));
    num("avg_tracking_error", s.metrics.avg_tracking_error);
    num("avg_control_effort", s.metrics.avg_control_effort);
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        num(std::string("max_abs_error_") + kWheelKeys[w], s.metrics.max_abs_error[w]);
    }
    num("envelope_A", s.envelope.A);
    num("envelope_k", s.envelope.k);
    num("envelope_c", s.envelope.c);
    num("envelope_t0", s.envelope.t0);
    num("envelope_coverage", s.envelope.coverage);
    kv("envelope_degenerate", s.envelope.degenerate ? "true" : "false");
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        num(std::string("lyapunov_a_bar_") + kWheelKeys[w], s.lyapunov.a_bar[w]);
    }
    num("lyapunov_eta_fit", s.lyapunov.eta_fit);
    num("lyapunov_sigma_over_eta_fit", s.lyapunov.sigma_over_eta_fit);
    num("lyapunov_transient_end", s.lyapunov.transient_end);
    num("lyapunov_bound_fraction", s.lyapunov.bound_fraction);
    if (s.lyapunov.f_star) num("lyapunov_f_star", *s.lyapunov.f_star);
    if (s.lyapunov.d_star) num("lyapunov_d_star", *s.lyapunov.d_star);
    kv("non_operable_count", std::to_string(s.non_operable.size()));
    for (std::size_t i = 0; i < s.non_operable.size(); ++i) {
        const auto& iv = s.non_operable[i];
        kv("non_operable_" + std::to_string(i), std::string(to_string(iv.target)) + "," +
                                                    std::string(to_string(iv.channel)) + "," +
                                                    format_number(iv.t_start) + "," + format_number(iv.t_end) + "," +
                                                    std::string(to_string(iv.status)));
    }
    kv("operations_halted", s.operations_halted ? "true" : "false");
}

void write_diagnostics_csv(std::ostream& out, const Series& error_norm, const Series& v_series) {
    out << "t,error_norm,lyapunov\n";
    for (std::size_t i = 0; i < error_norm.size(); ++i) {
        out << format_number(error_norm.t[i]) << ',' << format_number(error_norm.value[i]) << ','
            << format_number(i < v_series.size() ? v_series.value[i] : 0.0) << '\n';
    }
}

}  // namespace wheelftc
