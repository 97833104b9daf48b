#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"
#include "oracle.hpp"
#include "wheelftc/error.hpp"
#include "wheelftc/faults.hpp"

using namespace wheelftc;

namespace {

FaultState sensor(double eps, double sat, double amp = 0.0) { return {eps, sat, amp, Channel::Sensor}; }
FaultState actuator(double eps, double sat, double amp = 0.0) { return {eps, sat, amp, Channel::Actuator}; }

FaultScheduleEntry entry(FaultTarget target, Channel ch, double t0, double t1, double eps, double sat = 0.0) {
    return {target, ch, t0, t1, {eps, sat, 0.0, ch}};
}

}  // namespace

TEST_CASE("sensor channel algebra") {
    CHECK(apply_sensor_fault(2.0, sensor(0.0, 99.0), 0.0) == 2.0);
    CHECK(apply_sensor_fault(2.0, sensor(1.0, 5.0), 0.0) == 5.0);
    CHECK(apply_sensor_fault(2.0, sensor(0.5, 0.0), 0.0) == 1.0);
    CHECK(apply_sensor_fault(2.0, sensor(0.5, 1.0, 0.4), -1.5) == doctest::Approx(oracle::fault(2.0, 0.5, 1.0, 0.4, -1.5)));
}

TEST_CASE("actuator channel algebra") {
    CHECK(apply_actuator_fault(0.3, actuator(0.0, 7.0), 0.0) == 0.3);
    CHECK(apply_actuator_fault(0.3, actuator(1.0, 0.0), 0.0) == 0.0);
    CHECK(apply_actuator_fault(0.3, actuator(0.25, 0.1), 0.0) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("fault application rejects bad inputs") {
    CHECK_THROWS_AS(apply_sensor_fault(1.0, sensor(1.5, 0.0), 0.0), Error);
    CHECK_THROWS_AS(apply_sensor_fault(1.0, sensor(-0.1, 0.0), 0.0), Error);
    CHECK_THROWS_AS(apply_sensor_fault(1.0, actuator(0.5, 0.0), 0.0), Error);
    CHECK_THROWS_AS(apply_actuator_fault(1.0, sensor(0.5, 0.0), 0.0), Error);
}

TEST_CASE("identity at zero epsilon is exact for any sat") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> any(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double x = any(rng);
        const double s = any(rng);
        const double draw = any(rng);
        CHECK(apply_sensor_fault(x, sensor(0.0, s, 3.0), draw) == x);
        CHECK(apply_actuator_fault(x, actuator(0.0, s, 3.0), draw) == x);
    }
}

TEST_CASE("classification table") {
    CHECK(classify_fault(sensor(0.0, 5.0)) == FaultStatus::Healthy);
    CHECK(classify_fault(sensor(1.0, 0.0)) == FaultStatus::NoSignal);
    CHECK(classify_fault(sensor(1.0, 4.0)) == FaultStatus::StuckFailure);
    CHECK(classify_fault(sensor(0.5, 0.0)) == FaultStatus::Inefficient);
    CHECK(classify_fault(sensor(0.5, 0.2)) == FaultStatus::NoiseOrDisturbanceAffected);
    // noise alone counts as a nonzero saturation signal
    CHECK(classify_fault(actuator(1.0, 0.0, 0.1)) == FaultStatus::StuckFailure);
    CHECK(classify_fault(actuator(0.3, 0.0, 0.1)) == FaultStatus::NoiseOrDisturbanceAffected);
    CHECK(is_non_operable(FaultStatus::StuckFailure));
    CHECK(is_non_operable(FaultStatus::NoSignal));
    CHECK_FALSE(is_non_operable(FaultStatus::Inefficient));
    CHECK_FALSE(is_non_operable(FaultStatus::Healthy));
}

TEST_CASE("active fault lookup uses half-open windows") {
    const FaultSchedule sched({entry(FaultTarget::FR, Channel::Sensor, 30.0, 35.0, 1.0, 4.0)});
    CHECK(active_fault(sched, 29.999, FaultTarget::FR, Channel::Sensor).epsilon == 0.0);
    const auto at = active_fault(sched, 30.0, FaultTarget::FR, Channel::Sensor);
    CHECK(at.epsilon == 1.0);
    CHECK(at.sat == 4.0);
    CHECK(active_fault(sched, 34.999, FaultTarget::FR, Channel::Sensor).epsilon == 1.0);
    const auto after = active_fault(sched, 35.0, FaultTarget::FR, Channel::Sensor);
    CHECK(after.epsilon == 0.0);
    CHECK(after.sat == 0.0);
    CHECK(active_fault(sched, 32.0, FaultTarget::FL, Channel::Sensor).epsilon == 0.0);
    CHECK(active_fault(sched, 32.0, FaultTarget::FR, Channel::Actuator).epsilon == 0.0);
}

TEST_CASE("boundary ticks computed as n*dt land inside the window") {
    const FaultSchedule sched({entry(FaultTarget::RL, Channel::Actuator, 0.3, 0.7, 1.0)});
    // 0.1 * 3 = 0.30000000000000004 and 0.7 is not exactly representable
    CHECK(sched.find(3 * 0.1, FaultTarget::RL, Channel::Actuator) != nullptr);
    CHECK(sched.find(7 * 0.1, FaultTarget::RL, Channel::Actuator) == nullptr);
    CHECK(sched.find(699 * 0.001, FaultTarget::RL, Channel::Actuator) != nullptr);
}

TEST_CASE("schedule validation") {
    CHECK_THROWS_AS(FaultSchedule({entry(FaultTarget::FR, Channel::Sensor, 0, 1, 1.5)}), Error);
    CHECK_THROWS_AS(FaultSchedule({entry(FaultTarget::FR, Channel::Sensor, 2, 1, 0.5)}), Error);
    CHECK_THROWS_AS(FaultSchedule({entry(FaultTarget::FR, Channel::Sensor, -1, 1, 0.5)}), Error);
    try {
        FaultSchedule({entry(FaultTarget::FR, Channel::Sensor, 10, 20, 0.5),
                       entry(FaultTarget::FR, Channel::Sensor, 15, 25, 0.5)});
        FAIL("overlap accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Overlap);
    }
    // touching windows and different channels are fine
    CHECK_NOTHROW(FaultSchedule({entry(FaultTarget::FR, Channel::Sensor, 10, 20, 0.5),
                                 entry(FaultTarget::FR, Channel::Sensor, 20, 25, 0.5),
                                 entry(FaultTarget::FR, Channel::Actuator, 15, 25, 0.5)}));
}

TEST_CASE("healthy copy keeps windows and zeroes epsilon") {
    const FaultSchedule sched({entry(FaultTarget::FR, Channel::Sensor, 1, 2, 1.0, 4.0),
                               entry(FaultTarget::RearSteer, Channel::Actuator, 3, 4, 0.5)});
    const auto healthy = sched.healthy_copy();
    REQUIRE(healthy.entries().size() == 2);
    for (const auto& e : healthy.entries()) CHECK(e.fault.epsilon == 0.0);
    CHECK(healthy.entries()[0].t_start == 1.0);
    CHECK(classify_fault(healthy.entries()[0].fault) == FaultStatus::Healthy);
}

TEST_CASE("speed distortion from a sensor fault") {
    const auto d = speed_distortion(sensor(0.25, 2.0), 0.427);
    CHECK(d.delta == doctest::Approx(0.75));
    CHECK(d.delta_bar == doctest::Approx(0.427 * 0.25 * 2.0));
    const double omega = 1.3;
    CHECK(0.427 * apply_sensor_fault(omega, sensor(0.25, 2.0), 0.0) ==
          doctest::Approx(d.delta * 0.427 * omega + d.delta_bar));
}

TEST_CASE("names round-trip") {
    for (auto s : {FaultStatus::Healthy, FaultStatus::StuckFailure, FaultStatus::NoSignal, FaultStatus::Inefficient,
                   FaultStatus::NoiseOrDisturbanceAffected}) {
        CHECK(parse_fault_status(to_string(s)) == s);
    }
    for (std::size_t i = 0; i < kFaultTargetCount; ++i) {
        const auto t = static_cast<FaultTarget>(i);
        CHECK(parse_fault_target(to_string(t)) == t);
    }
    CHECK(parse_fault_target("fr") == FaultTarget::FR);
    CHECK(parse_fault_target("Front") == FaultTarget::FrontSteer);
    CHECK_FALSE(parse_fault_target("XX").has_value());
    CHECK(parse_channel("sensor") == Channel::Sensor);
    CHECK(parse_channel("actuator") == Channel::Actuator);
    CHECK_FALSE(parse_channel("valve").has_value());
}
