#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wheelftc/controller.hpp"
#include "wheelftc/kinematics.hpp"
#include "wheelftc/scenario.hpp"
#include "wheelftc/telemetry.hpp"

namespace wheelftc {

/// Largest absolute per-field difference between two telemetry traces, or
/// +inf when their lengths differ.
double max_abs_deviation(const Telemetry& a, const Telemetry& b);

/// Runs cfg through the fault pipeline and through the fault-bypassed pipeline
/// and returns max_abs_deviation of the two traces.
double verify_remark1(const ScenarioConfig& cfg);

/// Observed order of RK4 on x' = -x over [0, 1] from the error ratio at
/// dt = 0.1 and dt = 0.05.
double rk4_convergence_order();

struct AdaptiveDecayReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0;  // max relative excess over the decay bound
};

/// Randomised check of the adaptive law: |psi| nonincreasing, sign kept, and
/// |psi'| <= |psi| exp(-(beta + xi) dt) within 1e-9 relative.
AdaptiveDecayReport check_adaptive_decay(const ControllerGains& gains, std::size_t samples, std::uint64_t seed);

/// Integrates a smooth base trajectory at 1e-5 s and compares finite-difference
/// wheel-centre velocities with the inverse-kinematics vectors. Returns the
/// worst relative error.
double ik_finite_difference_error(const RobotGeometry& geom);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
};

/// Fault-bypass equivalence (on a healthy copy of the schedule), RK4 order,
/// adaptive decay, and the inverse-kinematics oracle.
std::vector<CheckResult> run_invariant_suite(const ScenarioConfig& cfg);

}  // namespace wheelftc
