#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wheelftc/controller.hpp"
#include "wheelftc/faults.hpp"
#include "wheelftc/kinematics.hpp"
#include "wheelftc/plant.hpp"

namespace wheelftc {

struct CommandKnot {
    double t = 0.0;
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s
};

/// Piecewise-linear base command, held constant outside the knot range.
class CommandProfile {
public:
    CommandProfile() = default;
    /// Throws Error(Profile) unless knot times strictly increase.
    explicit CommandProfile(std::vector<CommandKnot> knots);

    const std::vector<CommandKnot>& knots() const noexcept { return knots_; }

private:
    std::vector<CommandKnot> knots_;
};

BaseCommand command_profile_eval(const CommandProfile& profile, double t);

struct SimSettings {
    double dt = 0.001;
    double duration = 240.0;
    std::uint64_t seed = 1;
    int plant_substeps = 1;
    bool sensor_delay = false;  // measure the previous tick's state

    std::size_t tick_count() const;
};

struct MetricsSettings {
    double fit_start = 0.0;                // s, start of averaging and envelope fit
    std::optional<WheelArray> a_bar;  // defaults to K_v r / J per wheel
};

struct ScenarioConfig {
    std::string name = "scenario";
    RobotGeometry geometry;
    PlantParams plant;
    Environment environment;
    ControllerGains gains;
    CommandProfile command;
    FaultSchedule faults;
    SimSettings sim;
    MetricsSettings metrics;

    /// Re-checks every invariant; throws Error on the first violation.
    void validate() const;
    WheelArray a_bar() const;
};

/// Parses and validates a scenario document. Omitted sections take defaults.
ScenarioConfig load_scenario(std::string_view text);
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

}  // namespace wheelftc
