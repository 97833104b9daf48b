#include "wheelftc/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::Range, std::string("geometry.") + key + " = " + format_number(value) +
                                          " (must be > 0)");
    }
}

// z x r for a planar vector r.
Vec2 cross_z(double omega, Vec2 r) { return {-omega * r.y, omega * r.x}; }

Vec2 rotate(double angle, Vec2 r) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * r.x - s * r.y, s * r.x + c * r.y};
}

}  // namespace

void RobotGeometry::validate() const {
    require_positive(wheelbase, "wheelbase");
    require_positive(track, "track");
    require_positive(wheel_radius * 2.0, "wheel_diameter");
    require_positive(gear_ratio, "gear_ratio");
    if (!(wheel_offset >= 0.0) || !std::isfinite(wheel_offset)) {
        throw Error(ErrorCode::Range,
                    "geometry.wheel_offset = " + format_number(wheel_offset) + " (must be >= 0)");
    }
    if (!(steering_limit > 0.0) || !(steering_limit < std::numbers::pi / 2.0)) {
        throw Error(ErrorCode::Range, "geometry.steering_limit_deg = " +
                                          format_number(steering_limit * 180.0 / std::numbers::pi) +
                                          " (must be in (0, 90))");
    }
}

Vec2 RobotGeometry::joint_position(std::size_t wheel) const {
    const double x = wheel < 2 ? wheelbase / 2.0 : -wheelbase / 2.0;
    const double y = (wheel % 2 == 0) ? -track / 2.0 : track / 2.0;
    return {x, y};
}

Vec2 RobotGeometry::axle_position(std::size_t axle) const {
    return {axle == 0 ? wheelbase / 2.0 : -wheelbase / 2.0, 0.0};
}

AxleArray steering_angle_command(const BaseCommand& cmd, const RobotGeometry& geom) {
    AxleArray out{};
    for (std::size_t a = 0; a < kAxleCount; ++a) {
        const Vec2 lever = cross_z(cmd.omega_c, geom.axle_position(a));
        double vx = cmd.v_c + lever.x;
        double vy = lever.y;
        if (vx == 0.0 && vy == 0.0) {
            out[a] = 0.0;
            continue;
        }
        // A wheel rolling backwards keeps its orientation.
        if (vx < 0.0) {
            vx = -vx;
            vy = -vy;
        }
        out[a] = std::clamp(std::atan2(vy, vx), -geom.steering_limit, geom.steering_limit);
    }
    return out;
}

Vec2 wheel_center_velocity(const BaseCommand& cmd, const RobotGeometry& geom, std::size_t wheel,
                           double steer, double steer_rate) {
    const Vec2 joint = geom.joint_position(wheel);
    const Vec2 lever = cross_z(cmd.omega_c, joint);
    const Vec2 offset = rotate(steer, Vec2{geom.wheel_offset, 0.0});
    const Vec2 swing = cross_z(cmd.omega_c + steer_rate, offset);
    return {cmd.v_c + lever.x + swing.x, lever.y + swing.y};
}

WheelArray wheel_velocity_command(const BaseCommand& cmd, const RobotGeometry& geom,
                                  const AxleArray& steer, const AxleArray& steer_rate) {
    WheelArray out{};
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        const std::size_t a = axle_of_wheel(w);
        const Vec2 v = wheel_center_velocity(cmd, geom, w, steer[a], steer_rate[a]);
        const double speed = std::hypot(v.x, v.y);
        double sign = 0.0;
        if (cmd.v_c > 0.0) {
            sign = 1.0;
        } else if (cmd.v_c < 0.0) {
            sign = -1.0;
        } else {
            sign = v.x > 0.0 ? 1.0 : (v.x < 0.0 ? -1.0 : 0.0);
        }
        out[w] = sign * speed;
    }
    return out;
}

double wheel_angular_from_linear(double v, const RobotGeometry& geom) { return v / geom.wheel_radius; }

double motor_speed_from_linear(double v, const RobotGeometry& geom) {
    return geom.gear_ratio * v / geom.wheel_radius;
}

WheelCommandSet CommandMapper::map(const BaseCommand& cmd, double dt) {
    WheelCommandSet out;
    out.phi_cmd = steering_angle_command(cmd, geom_);
    if (primed_) {
        for (std::size_t a = 0; a < kAxleCount; ++a) {
            out.phi_rate[a] = (out.phi_cmd[a] - previous_phi_[a]) / dt;
        }
    }
    previous_phi_ = out.phi_cmd;
    primed_ = true;
    out.v_cmd = wheel_velocity_command(cmd, geom_, out.phi_cmd, out.phi_rate);
    return out;
}

}  // namespace wheelftc
