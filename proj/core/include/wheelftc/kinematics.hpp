#pragma once

#include <array>
#include <cstddef>
#include <numbers>

namespace wheelftc {

inline constexpr std::size_t kWheelCount = 4;
inline constexpr std::size_t kAxleCount = 2;

/// Wheel order used by every per-wheel array in the library.
enum class Wheel : std::size_t { FR = 0, FL = 1, RR = 2, RL = 3 };
enum class Axle : std::size_t { Front = 0, Rear = 1 };

using WheelArray = std::array<double, kWheelCount>;
using AxleArray = std::array<double, kAxleCount>;

constexpr std::size_t index(Wheel w) { return static_cast<std::size_t>(w); }
constexpr std::size_t index(Axle a) { return static_cast<std::size_t>(a); }

/// Front wheels steer with the front axle, rear wheels with the rear one.
constexpr std::size_t axle_of_wheel(std::size_t wheel) { return wheel < 2 ? 0 : 1; }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Geometry of a four-wheel robot steered per axle. Base frame: x forward, y left.
struct RobotGeometry {
    double wheelbase = 2.1;       // m, longitudinal spacing of the steering joints
    double track = 1.46;          // m, lateral spacing of the steering joints
    double wheel_radius = 0.427;  // m
    double wheel_offset = 0.05;   // m, steering joint to wheel centre
    double gear_ratio = 17.7;     // motor turns per wheel turn
    double steering_limit = std::numbers::pi / 4.0;  // rad

    /// Throws Error(Range) naming the offending scenario key.
    void validate() const;

    /// Steering joint of wheel i: (+-L/2, +-W/2).
    Vec2 joint_position(std::size_t wheel) const;
    /// Axle midpoint: (+-L/2, 0).
    Vec2 axle_position(std::size_t axle) const;
};

struct BaseCommand {
    double v_c = 0.0;      // m/s, signed
    double omega_c = 0.0;  // rad/s, yaw rate
};

struct WheelCommandSet {
    WheelArray v_cmd{};  // m/s
    AxleArray phi_cmd{};  // rad
    AxleArray phi_rate{};  // rad/s, backward difference of phi_cmd
};

/// Per-axle steering angle so the axle midpoint's velocity is along the wheel
/// plane. The angle is folded into (-pi/2, pi/2] so reversing does not flip the
/// wheels, then clamped to the steering limit.
AxleArray steering_angle_command(const BaseCommand& cmd, const RobotGeometry& geom);

/// Velocity of wheel centre j in base-frame coordinates, given the axle steering
/// angle and its rate.
Vec2 wheel_center_velocity(const BaseCommand& cmd, const RobotGeometry& geom, std::size_t wheel,
                           double steer, double steer_rate);

/// Signed linear speed command for every wheel. The sign follows v_c; for
/// v_c == 0 it follows the wheel centre's longitudinal velocity component.
WheelArray wheel_velocity_command(const BaseCommand& cmd, const RobotGeometry& geom,
                                  const AxleArray& steer, const AxleArray& steer_rate);

double wheel_angular_from_linear(double v, const RobotGeometry& geom);
double motor_speed_from_linear(double v, const RobotGeometry& geom);

/// Stateful wrapper that differentiates successive steering commands.
class CommandMapper {
public:
    explicit CommandMapper(const RobotGeometry& geom) : geom_(geom) {}

    WheelCommandSet map(const BaseCommand& cmd, double dt);
    void reset() { primed_ = false; }

private:
    RobotGeometry geom_;
    AxleArray previous_phi_{};
    bool primed_ = false;
};

}  // namespace wheelftc
