#include "wheelftc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

void require(bool ok, const std::string& key, double value, const char* rule) {
    if (!ok || !std::isfinite(value)) {
        throw Error(ErrorCode::Range, key + " = " + format_number(value) + " (" + rule + ")");
    }
}

}  // namespace

void PlantParams::validate() const {
    require(inertia > 0.0, "plant.inertia", inertia, "must be > 0");
    require(damping >= 0.0, "plant.damping", damping, "must be >= 0");
    require(coulomb >= 0.0, "plant.coulomb", coulomb, "must be >= 0");
    require(valve_gain > 0.0, "plant.valve_gain", valve_gain, "must be > 0");
    require(mass > 0.0, "plant.mass", mass, "must be > 0");
    require(steer_tau > 0.0, "plant.steer_tau", steer_tau, "must be > 0");
    require(steer_gain > 0.0, "plant.steer_gain", steer_gain, "must be > 0");
}

void Environment::validate() const {
    for (std::size_t i = 0; i < slope.size(); ++i) {
        const auto& k = slope[i];
        require(std::abs(k.grade) < std::numbers::pi / 2.0, "environment.slope[" + std::to_string(i) + "].grade_deg",
                k.grade * 180.0 / std::numbers::pi, "|grade| must be < 90");
        if (i > 0 && !(k.t > slope[i - 1].t)) {
            throw Error(ErrorCode::Profile, "environment.slope[" + std::to_string(i) + "].t = " + format_number(k.t) +
                                                " (knot times must be strictly increasing)");
        }
    }
    for (std::size_t i = 0; i < pulses.size(); ++i) {
        const auto& p = pulses[i];
        const auto key = "environment.pulses[" + std::to_string(i) + "]";
        require(p.wheel < kWheelCount, key + ".wheel", static_cast<double>(p.wheel), "unknown wheel");
        require(p.t_start >= 0.0, key + ".t0", p.t_start, "must be >= 0");
        require(p.t_end > p.t_start, key + ".t1", p.t_end, "must exceed t0");
        require(true, key + ".torque", p.torque, "must be finite");
    }
    require(noise_amp >= 0.0, "environment.noise_amp", noise_amp, "must be >= 0");
}

double Environment::grade_at(double t) const {
    if (slope.empty()) {
        return 0.0;
    }
    if (t <= slope.front().t) {
        return slope.front().grade;
    }
    if (t >= slope.back().t) {
        return slope.back().grade;
    }
    const auto hi = std::upper_bound(slope.begin(), slope.end(), t,
                                     [](double value, const SlopeKnot& k) { return value < k.t; });
    const auto lo = hi - 1;
    const double w = (t - lo->t) / (hi->t - lo->t);
    return lo->grade + w * (hi->grade - lo->grade);
}

double Environment::pulse_torque(std::size_t wheel, double t) const {
    double torque = 0.0;
    for (const auto& p : pulses) {
        if (p.wheel == wheel && t >= p.t_start && t < p.t_end) {
            torque += p.torque;
        }
    }
    return torque;
}

double gravity_torque(const PlantParams& p, double wheel_radius, double grade) {
    return (p.mass / 4.0) * kGravity * std::sin(grade) * wheel_radius;
}

double smooth_sign(double omega) { return std::tanh(omega / kFrictionSmoothing); }

double wheel_accel(const WheelState& state, double u_v, const PlantParams& p, double wheel_radius,
                   double env_torque, double grade) {
    const double omega = state.omega_a;
    const double torque = p.valve_gain * u_v - p.damping * omega - p.coulomb * smooth_sign(omega) -
                          gravity_torque(p, wheel_radius, grade) - env_torque;
    return torque / p.inertia;
}

double steering_rate(double phi, double u_s, const PlantParams& p, double limit) {
    const double rate = p.steer_gain * u_s;
    if ((phi >= limit && rate > 0.0) || (phi <= -limit && rate < 0.0)) {
        return 0.0;
    }
    return rate;
}

double integrate_steering(double phi, double u_s, const PlantParams& p, double limit, double dt) {
    const double next = phi + steering_rate(phi, u_s, p, limit) * dt;
    return std::clamp(next, -limit, limit);
}

DriveState advance_drive(const DriveState& omega, const WheelArray& u_v, const WheelArray& env_torque,
                         const PlantParams& p, const Environment& env, double wheel_radius, double t,
                         double dt, int substeps) {
    const double h = dt / static_cast<double>(substeps);
    auto derivative = [&](double tau, const DriveState& x) {
        const double grade = env.grade_at(tau);
        DriveState dx;
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            dx[w] = wheel_accel(WheelState{x[w]}, u_v[w], p, wheel_radius, env_torque[w], grade);
        }
        return dx;
    };
    DriveState x = omega;
    for (int s = 0; s < substeps; ++s) {
        x = rk4_step(x, t + s * h, h, derivative);
    }
    return x;
}

}  // namespace wheelftc
