#include "wheelftc/faults.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

std::string entry_label(std::size_t i) { return "fault[" + std::to_string(i) + "]"; }

double apply_fault(double input, const FaultState& f, double rng_draw, Channel expected) {
    if (f.channel != expected) {
        throw Error(ErrorCode::Range, std::string("fault channel mismatch: expected ") +
                                          std::string(to_string(expected)) + ", got " +
                                          std::string(to_string(f.channel)));
    }
    if (!(f.epsilon >= 0.0 && f.epsilon <= 1.0)) {
        throw Error(ErrorCode::Range,
                    "epsilon = " + format_number(f.epsilon) + " (expected 0 <= epsilon <= 1)");
    }
    if (f.epsilon == 0.0) {
        return input;
    }
    const double sat = f.sat_noise_amp > 0.0 ? f.sat + f.sat_noise_amp * rng_draw : f.sat;
    return (1.0 - f.epsilon) * input + f.epsilon * sat;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

FaultSchedule::FaultSchedule(std::vector<FaultScheduleEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        const auto label = entry_label(i);
        if (!(e.fault.epsilon >= 0.0 && e.fault.epsilon <= 1.0)) {
            throw Error(ErrorCode::Range, label + ".epsilon = " + format_number(e.fault.epsilon) +
                                              " (expected 0 <= epsilon <= 1)");
        }
        if (!std::isfinite(e.fault.sat)) {
            throw Error(ErrorCode::Range, label + ".sat = " + format_number(e.fault.sat) + " (must be finite)");
        }
        if (!(e.fault.sat_noise_amp >= 0.0) || !std::isfinite(e.fault.sat_noise_amp)) {
            throw Error(ErrorCode::Range, label + ".sat_noise = " + format_number(e.fault.sat_noise_amp) +
                                              " (must be >= 0)");
        }
        if (!(e.t_start >= 0.0) || !std::isfinite(e.t_start)) {
            throw Error(ErrorCode::Range, label + ".t0 = " + format_number(e.t_start) + " (must be >= 0)");
        }
        if (!(e.t_end > e.t_start) || !std::isfinite(e.t_end)) {
            throw Error(ErrorCode::Range, label + ".t1 = " + format_number(e.t_end) + " (must exceed t0 = " +
                                              format_number(e.t_start) + ")");
        }
        if (e.fault.channel != e.channel) {
            throw Error(ErrorCode::Range, label + ".channel does not match its fault state");
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            const auto& a = entries_[i];
            const auto& b = entries_[j];
            if (a.target != b.target || a.channel != b.channel) {
                continue;
            }
            if (a.t_start < b.t_end && b.t_start < a.t_end) {
                throw Error(ErrorCode::Overlap,
                            entry_label(i) + " [" + format_number(a.t_start) + ", " + format_number(a.t_end) +
                                ") overlaps " + entry_label(j) + " [" + format_number(b.t_start) + ", " +
                                format_number(b.t_end) + ") on wheel " + std::string(to_string(a.target)) +
                                " " + std::string(to_string(a.channel)));
            }
        }
    }
}

const FaultScheduleEntry* FaultSchedule::find(double t, FaultTarget target, Channel channel) const {
    for (const auto& e : entries_) {
        if (e.target == target && e.channel == channel && t >= e.t_start - kWindowSlack &&
            t < e.t_end - kWindowSlack) {
            return &e;
        }
    }
    return nullptr;
}

FaultSchedule FaultSchedule::healthy_copy() const {
    FaultSchedule copy = *this;
    for (auto& e : copy.entries_) {
        e.fault.epsilon = 0.0;
    }
    return copy;
}

double apply_sensor_fault(double omega_actual, const FaultState& f, double rng_draw) {
    return apply_fault(omega_actual, f, rng_draw, Channel::Sensor);
}

double apply_actuator_fault(double u_cmd, const FaultState& f, double rng_draw) {
    return apply_fault(u_cmd, f, rng_draw, Channel::Actuator);
}

FaultStatus classify_fault(const FaultState& f) {
    if (f.epsilon <= 0.0) {
        return FaultStatus::Healthy;
    }
    const bool has_sat = std::abs(f.sat) > 0.0 || f.sat_noise_amp > 0.0;
    if (f.epsilon >= 1.0) {
        return has_sat ? FaultStatus::StuckFailure : FaultStatus::NoSignal;
    }
    return has_sat ? FaultStatus::NoiseOrDisturbanceAffected : FaultStatus::Inefficient;
}

FaultState active_fault(const FaultSchedule& schedule, double t, FaultTarget target, Channel channel) {
    if (const auto* e = schedule.find(t, target, channel)) {
        return e->fault;
    }
    FaultState healthy;
    healthy.channel = channel;
    return healthy;
}

SpeedDistortion speed_distortion(const FaultState& sensor_fault, double wheel_radius) {
    return {1.0 - sensor_fault.epsilon, wheel_radius * sensor_fault.epsilon * sensor_fault.sat};
}

std::string_view to_string(Channel c) { return c == Channel::Sensor ? "sensor" : "actuator"; }

std::string_view to_string(FaultTarget t) {
    switch (t) {
        case FaultTarget::FR: return "FR";
        case FaultTarget::FL: return "FL";
        case FaultTarget::RR: return "RR";
        case FaultTarget::RL: return "RL";
        case FaultTarget::FrontSteer: return "front";
        case FaultTarget::RearSteer: return "rear";
    }
    return "?";
}

std::string_view to_string(FaultStatus s) {
    switch (s) {
        case FaultStatus::Healthy: return "healthy";
        case FaultStatus::StuckFailure: return "stuck_failure";
        case FaultStatus::NoSignal: return "no_signal";
        case FaultStatus::Inefficient: return "inefficient";
        case FaultStatus::NoiseOrDisturbanceAffected: return "noise_or_disturbance";
    }
    return "?";
}

std::optional<Channel> parse_channel(std::string_view text) {
    const auto s = lower(text);
    if (s == "sensor") return Channel::Sensor;
    if (s == "actuator") return Channel::Actuator;
    return std::nullopt;
}

std::optional<FaultTarget> parse_fault_target(std::string_view text) {
    const auto s = lower(text);
    if (s == "fr") return FaultTarget::FR;
    if (s == "fl") return FaultTarget::FL;
    if (s == "rr") return FaultTarget::RR;
    if (s == "rl") return FaultTarget::RL;
    if (s == "front") return FaultTarget::FrontSteer;
    if (s == "rear") return FaultTarget::RearSteer;
    return std::nullopt;
}

std::optional<FaultStatus> parse_fault_status(std::string_view text) {
    for (auto s : {FaultStatus::Healthy, FaultStatus::StuckFailure, FaultStatus::NoSignal,
                   FaultStatus::Inefficient, FaultStatus::NoiseOrDisturbanceAffected}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

}  // namespace wheelftc
