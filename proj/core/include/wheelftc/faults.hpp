#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wheelftc {

enum class Channel { Sensor, Actuator };

/// Fault targets: the four drive wheels followed by the two steering axles.
enum class FaultTarget : std::size_t { FR = 0, FL = 1, RR = 2, RL = 3, FrontSteer = 4, RearSteer = 5 };
inline constexpr std::size_t kFaultTargetCount = 6;

enum class FaultStatus { Healthy, StuckFailure, NoSignal, Inefficient, NoiseOrDisturbanceAffected };

/// A fault on one channel: output = (1 - epsilon) * input + epsilon * (sat + sat_noise_amp * draw).
struct FaultState {
    double epsilon = 0.0;
    double sat = 0.0;            // rad/s on the sensor channel, valve units on the actuator channel
    double sat_noise_amp = 0.0;  // amplitude of the zero-mean noise added to sat
    Channel channel = Channel::Sensor;
};

struct FaultScheduleEntry {
    FaultTarget target = FaultTarget::FR;
    Channel channel = Channel::Sensor;
    double t_start = 0.0;
    double t_end = 0.0;
    FaultState fault;
};

// Window bounds are compared with this slack so that ticks at n*dt land on the
// intended side of a boundary despite rounding.
inline constexpr double kWindowSlack = 1e-9;

/// Validated, immutable set of time-windowed faults. Windows are half-open.
class FaultSchedule {
public:
    FaultSchedule() = default;
    /// Throws Error(Range) for invalid entries and Error(Overlap) for
    /// overlapping windows on one (target, channel).
    explicit FaultSchedule(std::vector<FaultScheduleEntry> entries);

    const std::vector<FaultScheduleEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    /// Entry whose window contains t, if any.
    const FaultScheduleEntry* find(double t, FaultTarget target, Channel channel) const;

    /// Same windows with every epsilon forced to zero.
    FaultSchedule healthy_copy() const;

private:
    std::vector<FaultScheduleEntry> entries_;
};

double apply_sensor_fault(double omega_actual, const FaultState& f, double rng_draw);
double apply_actuator_fault(double u_cmd, const FaultState& f, double rng_draw);

FaultStatus classify_fault(const FaultState& f);

/// Stuck and no-signal faults carry no closed-loop information.
constexpr bool is_non_operable(FaultStatus s) {
    return s == FaultStatus::StuckFailure || s == FaultStatus::NoSignal;
}

/// Active fault at t, or the healthy state (epsilon = 0, sat = 0).
FaultState active_fault(const FaultSchedule& schedule, double t, FaultTarget target, Channel channel);

/// Multiplicative and additive distortion of the measured linear speed,
/// v_meas = delta * v_actual + delta_bar, for a sensor fault.
struct SpeedDistortion {
    double delta = 1.0;
    double delta_bar = 0.0;
};
SpeedDistortion speed_distortion(const FaultState& sensor_fault, double wheel_radius);

std::string_view to_string(Channel c);
std::string_view to_string(FaultTarget t);
std::string_view to_string(FaultStatus s);
std::optional<Channel> parse_channel(std::string_view text);
std::optional<FaultTarget> parse_fault_target(std::string_view text);
std::optional<FaultStatus> parse_fault_status(std::string_view text);

}  // namespace wheelftc
