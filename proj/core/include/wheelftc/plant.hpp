#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wheelftc/kinematics.hpp"

namespace wheelftc {

inline constexpr double kGravity = 9.81;           // m/s^2
inline constexpr double kFrictionSmoothing = 1e-3;  // rad/s, width of the tanh Coulomb term

/// Lumped per-wheel drive parameters and the steering actuator model.
struct PlantParams {
    double inertia = 20.0;       // J, kg m^2 at the wheel shaft
    double damping = 5.0;        // C_m, N m s/rad
    double coulomb = 15.0;       // f_c, N m
    double valve_gain = 5000.0;  // K_v, N m per valve unit
    double mass = 6650.0;        // kg
    double steer_tau = 0.5;      // s
    double steer_gain = 0.4;     // K_s, rad/s per valve unit

    void validate() const;
};

struct SlopeKnot {
    double t = 0.0;
    double grade = 0.0;  // rad
};

struct DisturbancePulse {
    std::size_t wheel = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    double torque = 0.0;  // N m, opposes motion like a load
};

struct Environment {
    std::vector<SlopeKnot> slope;  // piecewise linear, held outside the knots
    std::vector<DisturbancePulse> pulses;
    double noise_amp = 0.0;  // N m, scales a unit normal draw per wheel per tick

    void validate() const;
    double grade_at(double t) const;
    double pulse_torque(std::size_t wheel, double t) const;
};

struct WheelState {
    double omega_a = 0.0;  // rad/s

    double v_a(const RobotGeometry& geom) const { return geom.wheel_radius * omega_a; }
};

struct SteeringState {
    AxleArray phi{};  // rad
};

double gravity_torque(const PlantParams& p, double wheel_radius, double grade);

/// Smooth sign used for Coulomb friction.
double smooth_sign(double omega);

/// Angular acceleration of one wheel under valve command u_v.
double wheel_accel(const WheelState& state, double u_v, const PlantParams& p, double wheel_radius,
                   double env_torque, double grade);

/// Steering joint rate K_s * u_s; zero when pushing into a hard stop.
double steering_rate(double phi, double u_s, const PlantParams& p, double limit);

/// Advances one steering axle over dt under a held command and clamps at the stops.
double integrate_steering(double phi, double u_s, const PlantParams& p, double limit, double dt);

/// Classical fourth-order Runge-Kutta step of x' = f(t, x). State must support
/// x + x and double * x.
template <class State, class Derivative>
State rk4_step(const State& x, double t, double dt, Derivative&& f) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * dt, x + (0.5 * dt) * k1);
    const State k3 = f(t + 0.5 * dt, x + (0.5 * dt) * k2);
    const State k4 = f(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Fixed-size vector with the arithmetic rk4_step needs.
template <std::size_t N>
struct StateVector {
    std::array<double, N> v{};

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    friend StateVector operator+(const StateVector& a, const StateVector& b) {
        StateVector out;
        for (std::size_t i = 0; i < N; ++i) out.v[i] = a.v[i] + b.v[i];
        return out;
    }
    friend StateVector operator*(double s, const StateVector& a) {
        StateVector out;
        for (std::size_t i = 0; i < N; ++i) out.v[i] = s * a.v[i];
        return out;
    }
};

using DriveState = StateVector<kWheelCount>;

/// Integrates the four decoupled wheel equations over [t, t + dt] in
/// `substeps` RK4 steps with the valve commands and load torques held.
DriveState advance_drive(const DriveState& omega, const WheelArray& u_v, const WheelArray& env_torque,
                         const PlantParams& p, const Environment& env, double wheel_radius, double t,
                         double dt, int substeps);

}  // namespace wheelftc
