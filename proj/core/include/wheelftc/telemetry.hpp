#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wheelftc/kinematics.hpp"

namespace wheelftc {

/// One control tick. Per-wheel arrays follow FR, FL, RR, RL; per-axle arrays front, rear.
struct TelemetryRow {
    double t = 0.0;
    WheelArray v_cmd{};
    WheelArray v_actual{};
    WheelArray v_meas{};
    WheelArray u_a{};
    WheelArray u_v{};
    WheelArray psi{};
    AxleArray phi_cmd{};
    AxleArray phi_meas{};
    AxleArray u_s{};
    std::uint32_t non_operable_mask = 0;  // bits 0-3 wheels, bits 4-5 steering axles
};

using Telemetry = std::vector<TelemetryRow>;

inline constexpr std::size_t kTelemetryColumns = 1 + 6 * kWheelCount + 3 * kAxleCount + 1;

std::vector<std::string> telemetry_header();

/// Every numeric field of a row in header order (mask last, as a double).
std::vector<double> flatten(const TelemetryRow& row);

/// CSV with shortest round-trip numbers.
void write_telemetry_csv(std::ostream& out, const Telemetry& telemetry);

/// Throws Error(Parse) naming the offending line; an empty file is an error.
Telemetry read_telemetry_csv(std::istream& in);

}  // namespace wheelftc
