#include "wheelftc/verify.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "wheelftc/engine.hpp"
#include "wheelftc/plant.hpp"

namespace wheelftc {

double max_abs_deviation(const Telemetry& a, const Telemetry& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto fa = flatten(a[i]);
        const auto fb = flatten(b[i]);
        for (std::size_t j = 0; j < fa.size(); ++j) {
            const double d = std::abs(fa[j] - fb[j]);
            if (std::isnan(d)) return std::numeric_limits<double>::infinity();
            worst = std::max(worst, d);
        }
    }
    return worst;
}

double verify_remark1(const ScenarioConfig& cfg) {
    const auto faulted = simulate(cfg, RunOptions{false});
    const auto bypassed = simulate(cfg, RunOptions{true});
    return max_abs_deviation(faulted, bypassed);
}

double rk4_convergence_order() {
    auto global_error = [](double dt) {
        const int steps = static_cast<int>(std::lround(1.0 / dt));
        double x = 1.0;
        for (int i = 0; i < steps; ++i) {
            x = rk4_step(x, i * dt, dt, [](double, double y) { return -y; });
        }
        return std::abs(x - std::exp(-1.0));
    };
    return std::log2(global_error(0.1) / global_error(0.05));
}

AdaptiveDecayReport check_adaptive_decay(const ControllerGains& gains, std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> psi_dist(-5.0, 5.0);
    std::uniform_real_distribution<double> speed_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> dt_dist(1e-6, 1e-3);
    AdaptiveDecayReport report;
    report.samples = samples;
    for (std::size_t i = 0; i < samples; ++i) {
        const double psi = psi_dist(rng);
        const double v_cmd = speed_dist(rng);
        const double v_meas = speed_dist(rng);
        const double dt = dt_dist(rng);
        const double next = adaptive_update(psi, v_cmd, v_meas, gains, dt);
        const double bound = std::abs(psi) * std::exp(-(gains.beta + gains.xi) * dt);
        const bool sign_kept = psi == 0.0 ? next == 0.0 : (std::signbit(psi) == std::signbit(next));
        const double excess = std::abs(psi) > 0.0 ? (std::abs(next) - bound) / std::abs(psi) : std::abs(next);
        report.worst_excess = std::max(report.worst_excess, excess);
        if (!sign_kept || std::abs(next) > std::abs(psi) || excess > 1e-9) {
            ++report.violations;
        }
    }
    return report;
}

double ik_finite_difference_error(const RobotGeometry& geom) {
    auto command = [](double t) {
        return BaseCommand{0.3 + 0.05 * std::sin(0.9 * t), 0.05 + 0.15 * std::sin(0.6 * t)};
    };
    constexpr double h = 1e-5;
    constexpr int steps = 200000;  // 2 s
    constexpr int sample_every = 5000;

    using Pose = StateVector<3>;  // x, y, heading
    auto pose_rate = [&](double t, const Pose& p) {
        const auto c = command(t);
        Pose d;
        d[0] = c.v_c * std::cos(p[2]);
        d[1] = c.v_c * std::sin(p[2]);
        d[2] = c.omega_c;
        return d;
    };
    auto wheel_world = [&](const Pose& p, double t, std::size_t w) {
        const double phi = steering_angle_command(command(t), geom)[axle_of_wheel(w)];
        const Vec2 joint = geom.joint_position(w);
        const Vec2 local{joint.x + geom.wheel_offset * std::cos(phi), joint.y + geom.wheel_offset * std::sin(phi)};
        const double c = std::cos(p[2]);
        const double s = std::sin(p[2]);
        return Vec2{p[0] + c * local.x - s * local.y, p[1] + s * local.x + c * local.y};
    };

    std::vector<Pose> poses(steps + 1);
    for (int i = 0; i < steps; ++i) {
        poses[i + 1] = rk4_step(poses[i], i * h, h, pose_rate);
    }

    double worst = 0.0;
    for (int i = sample_every; i < steps; i += sample_every) {
        const double t = i * h;
        const auto cmd = command(t);
        const auto phi_plus = steering_angle_command(command(t + h), geom);
        const auto phi_minus = steering_angle_command(command(t - h), geom);
        const auto phi = steering_angle_command(cmd, geom);
        const double c = std::cos(poses[i][2]);
        const double s = std::sin(poses[i][2]);
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            const std::size_t a = axle_of_wheel(w);
            const double phi_rate = (phi_plus[a] - phi_minus[a]) / (2.0 * h);
            const Vec2 vb = wheel_center_velocity(cmd, geom, w, phi[a], phi_rate);
            const Vec2 vw{c * vb.x - s * vb.y, s * vb.x + c * vb.y};
            const Vec2 p_plus = wheel_world(poses[i + 1], t + h, w);
            const Vec2 p_minus = wheel_world(poses[i - 1], t - h, w);
            const Vec2 fd{(p_plus.x - p_minus.x) / (2.0 * h), (p_plus.y - p_minus.y) / (2.0 * h)};
            const double rel = std::hypot(fd.x - vw.x, fd.y - vw.y) / std::hypot(vw.x, vw.y);
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

std::vector<CheckResult> run_invariant_suite(const ScenarioConfig& cfg) {
    std::vector<CheckResult> out;
    ScenarioConfig healthy = cfg;
    healthy.faults = cfg.faults.healthy_copy();
    const double dev = verify_remark1(healthy);
    out.push_back({"fault_bypass_equivalence", dev <= 1e-12, dev, 1e-12});

    const double order = rk4_convergence_order();
    out.push_back({"rk4_order", order >= 3.9, order, 3.9});

    const auto decay = check_adaptive_decay(cfg.gains, 100000, cfg.sim.seed);
    out.push_back({"adaptive_decay", decay.violations == 0, decay.worst_excess, 1e-9});

    const double ik = ik_finite_difference_error(cfg.geometry);
    out.push_back({"ik_finite_difference", ik <= 1e-4, ik, 1e-4});
    return out;
}

}  // namespace wheelftc
