// Prints one PASS/FAIL line per acceptance criterion. Criterion 9 is
// informational and never affects the exit status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracle.hpp"
#include "wheelftc/engine.hpp"
#include "wheelftc/error.hpp"
#include "wheelftc/faults.hpp"
#include "wheelftc/verify.hpp"

namespace fs = std::filesystem;
using namespace wheelftc;

namespace {

constexpr double kHealthyThreshold = 0.01;  // m/s, pinned by the healthy_step reference run

const fs::path kScenarios = WHEELFTC_SCENARIO_DIR;
const fs::path kTmp = fs::path(WHEELFTC_TEST_TMP) / "acceptance";

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) { return format_number(v); }

double max_wheel_error(const TelemetryRow& row) {
    double e = 0.0;
    for (std::size_t w = 0; w < kWheelCount; ++w) e = std::max(e, std::abs(row.v_actual[w] - row.v_cmd[w]));
    return e;
}

bool all_finite(const Telemetry& tel) {
    for (const auto& row : tel) {
        for (double v : flatten(row)) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string csv_bytes(const Telemetry& tel) {
    std::ostringstream o;
    write_telemetry_csv(o, tel);
    return o.str();
}

Outcome bypass_equivalence() {
    auto cfg = load_scenario_file(kScenarios / "healthy_step.toml");
    cfg.sim.duration = 240.0;
    cfg.sim.dt = 0.001;
    const auto start = std::chrono::steady_clock::now();
    const double dev = verify_remark1(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {dev <= 1e-12 && secs < 5.0,
            "max deviation " + num(dev) + " over 240001 ticks, wall " + num(std::round(secs * 1000) / 1000) + " s"};
}

Outcome healthy_convergence() {
    const auto cfg = load_scenario_file(kScenarios / "healthy_step.toml");
    const auto result = run_scenario(cfg);
    double last_above = -1.0;
    for (const auto& row : result.telemetry) {
        if (max_wheel_error(row) >= kHealthyThreshold) last_above = row.t;
    }
    const auto& env = result.summary.envelope;
    const bool pass = last_above < 5.0 && env.coverage >= 0.99 && env.k > 0.0;
    return {pass, "threshold " + num(kHealthyThreshold) + " m/s, last exceedance t=" + num(last_above) +
                      " s, coverage " + num(env.coverage) + ", k " + num(env.k) + " 1/s"};
}

Outcome inefficient_actuator() {
    const auto cfg = load_scenario_file(kScenarios / "actuator_inefficient_fr.toml");
    const auto result = run_scenario(cfg);
    const auto& tel = result.telemetry;
    const auto& fault = cfg.faults.entries().at(0);
    double worst_in = 0.0;
    double last_above = fault.t_end;
    for (const auto& row : tel) {
        const double e = std::abs(row.v_actual[0] - row.v_cmd[0]);
        if (row.t >= fault.t_start - kWindowSlack && row.t < fault.t_end - kWindowSlack) {
            worst_in = std::max(worst_in, e);
        }
        if (row.t >= fault.t_end - kWindowSlack && max_wheel_error(row) >= kHealthyThreshold) last_above = row.t;
    }
    const double bound = 0.5 * 0.36;
    const double recovery = last_above - fault.t_end;
    const bool pass = all_finite(tel) && worst_in <= bound && recovery <= 3.0;
    return {pass, "max |e_FR| in window " + num(worst_in) + " (bound " + num(bound) + "), recovery " +
                      num(recovery) + " s"};
}

double first_tick_at_or_after(double t, double dt) {
    return static_cast<double>(static_cast<std::size_t>(std::ceil(t / dt - 1e-9))) * dt;
}

Outcome non_operable() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"sensor_stuck_fr", "sensor_no_signal_fl", "actuator_no_signal_rl", "actuator_stuck_rr",
                             "mixed_duty_cycle"}) {
        const auto cfg = load_scenario_file(kScenarios / (std::string(name) + ".toml"));
        RunResult result;
        try {
            result = run_scenario(cfg);
        } catch (const Error& e) {
            pass = false;
            detail += std::string(name) + ": " + e.what() + "; ";
            continue;
        }
        std::vector<NonOperableInterval> expected;
        for (const auto& e : cfg.faults.entries()) {
            const auto status = classify_fault(e.fault);
            if (!is_non_operable(status)) continue;
            expected.push_back({e.target, e.channel, first_tick_at_or_after(e.t_start, cfg.sim.dt),
                                first_tick_at_or_after(e.t_end, cfg.sim.dt), status});
        }
        const auto& got = result.summary.non_operable;
        bool same = got.size() == expected.size() && result.summary.operations_halted == !expected.empty();
        for (std::size_t i = 0; same && i < got.size(); ++i) {
            const auto match = std::find_if(expected.begin(), expected.end(), [&](const NonOperableInterval& x) {
                return x.target == got[i].target && x.channel == got[i].channel && x.status == got[i].status &&
                       x.t_start == got[i].t_start && x.t_end == got[i].t_end;
            });
            same = match != expected.end();
        }
        same = same && all_finite(result.telemetry);
        pass = pass && same;
        detail += std::string(name) + " " + std::to_string(got.size()) + "/" + std::to_string(expected.size()) +
                  (same ? " ok; " : " MISMATCH; ");
    }
    return {pass, detail};
}

Outcome adaptive_law() {
    const ControllerGains gains;
    const auto rep = check_adaptive_decay(gains, 100000, 2024);
    // independent replay with its own sampler
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> psi(-10.0, 10.0), v(-5.0, 5.0), dt(1e-7, 1e-3);
    std::size_t bad = 0;
    for (int i = 0; i < 100000; ++i) {
        const double p = psi(rng), h = dt(rng);
        const double next = adaptive_update(p, v(rng), v(rng), gains, h);
        const double bound = std::abs(p) * std::exp(-(gains.beta + gains.xi) * h);
        if (std::abs(next) > std::abs(p) || std::abs(next) > bound * (1 + 1e-9) ||
            (p != 0.0 && std::signbit(next) != std::signbit(p))) {
            ++bad;
        }
    }
    return {rep.samples == 100000 && rep.violations == 0 && bad == 0,
            std::to_string(rep.samples) + " library samples, " + std::to_string(rep.violations) +
                " violations; 100000 replay samples, " + std::to_string(bad) + " violations"};
}

FaultStatus expected_status(double eps, double sat) {
    if (eps == 0.0) return FaultStatus::Healthy;
    if (eps == 1.0) return sat != 0.0 ? FaultStatus::StuckFailure : FaultStatus::NoSignal;
    return sat != 0.0 ? FaultStatus::NoiseOrDisturbanceAffected : FaultStatus::Inefficient;
}

Outcome fault_algebra() {
    std::size_t cells = 0;
    std::size_t bad = 0;
    for (double eps : {0.0, 0.25, 0.5, 1.0}) {
        for (double sat : {0.0, 0.7, -0.7}) {
            for (Channel ch : {Channel::Sensor, Channel::Actuator}) {
                ++cells;
                const FaultState f{eps, sat, 0.0, ch};
                if (classify_fault(f) != expected_status(eps, sat)) ++bad;
                for (double x : {-3.0, -0.36, 0.0, 0.36, 2.5}) {
                    const double out =
                        ch == Channel::Sensor ? apply_sensor_fault(x, f, 0.0) : apply_actuator_fault(x, f, 0.0);
                    const double lo = std::min(x, sat), hi = std::max(x, sat);
                    if (out < lo - 1e-15 || out > hi + 1e-15) ++bad;
                    if (std::abs(out - oracle::fault(x, eps, sat)) > 1e-15) ++bad;
                    if (eps == 0.0 && out != x) ++bad;
                }
            }
        }
    }
    return {bad == 0, std::to_string(cells) + " grid cells, " + std::to_string(bad) + " mismatches"};
}

Outcome numerics() {
    const double order = rk4_convergence_order();
    const double ik = ik_finite_difference_error(RobotGeometry{});
    return {order >= 3.9 && ik <= 1e-4, "rk4 order " + num(order) + ", IK relative error " + num(ik)};
}

Outcome determinism() {
    const auto cfg = load_scenario_file(kScenarios / "mixed_duty_cycle.toml");
    const bool repeat = csv_bytes(simulate(cfg)) == csv_bytes(simulate(cfg));

    fs::remove_all(kTmp);
    std::ostringstream sink;
    const int c1 = cli::batch(kScenarios, kTmp / "jobs1", 1, sink, sink);
    const int c8 = cli::batch(kScenarios, kTmp / "jobs8", 8, sink, sink);
    std::size_t compared = 0;
    std::size_t differing = 0;
    for (const auto& entry : fs::directory_iterator(kScenarios)) {
        if (entry.path().extension() != ".toml") continue;
        const auto stem = entry.path().stem();
        ++compared;
        if (read_file(kTmp / "jobs1" / stem / "telemetry.csv") != read_file(kTmp / "jobs8" / stem / "telemetry.csv") ||
            read_file(kTmp / "jobs1" / stem / "summary.txt") != read_file(kTmp / "jobs8" / stem / "summary.txt")) {
            ++differing;
        }
    }
    const bool index_same = read_file(kTmp / "jobs1" / "index.csv") == read_file(kTmp / "jobs8" / "index.csv");
    const bool pass = repeat && c1 == 0 && c8 == 0 && differing == 0 && index_same && compared > 0;
    return {pass, std::string("repeat run ") + (repeat ? "identical" : "DIFFERENT") + "; batch jobs=1 vs jobs=8 " +
                      std::to_string(compared) + " scenarios, " + std::to_string(differing) + " differing"};
}

Outcome sanity_band() {
    const auto cfg = load_scenario_file(kScenarios / "mixed_duty_cycle.toml");
    const auto result = run_scenario(cfg);
    const double avg = result.summary.metrics.avg_tracking_error;
    return {avg >= 0.001 && avg <= 0.1, "mixed duty cycle avg tracking error " + num(avg) +
                                            " m/s (band [0.001, 0.1]), avg effort " +
                                            num(result.summary.metrics.avg_control_effort)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
        bool informational;
    };
    const std::vector<Criterion> criteria = {
        {1, "fault-bypass equivalence", bypass_equivalence, false},
        {2, "healthy convergence", healthy_convergence, false},
        {3, "inefficient actuator tolerance", inefficient_actuator, false},
        {4, "stuck and no-signal intervals", non_operable, false},
        {5, "adaptive law decay", adaptive_law, false},
        {6, "fault model algebra", fault_algebra, false},
        {7, "integrator order and kinematics oracle", numerics, false},
        {8, "determinism", determinism, false},
        {9, "sanity band (informational)", sanity_band, true},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail;
        if (c.informational && !o.pass) std::cout << " (logged, not enforced)";
        std::cout << std::endl;
        if (!o.pass && !c.informational) ++failures;
    }
    std::cout << (failures == 0 ? "all enforced criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
