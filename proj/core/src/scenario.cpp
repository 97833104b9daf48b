#include "wheelftc/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include "wheelftc/config_document.hpp"
#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

using config::Array;
using config::Table;
using config::Value;

constexpr double kDegToRad = std::numbers::pi / 180.0;

[[noreturn]] void parse_fail(const std::string& key, const Value& v, const std::string& what) {
    throw Error(ErrorCode::Parse, "line " + std::to_string(v.line) + ": " + key + ": " + what);
}

double as_number(const Value& v, const std::string& key) {
    if (!v.is_number()) parse_fail(key, v, "expected a number");
    return std::get<double>(v.data);
}

std::string as_string(const Value& v, const std::string& key) {
    if (!v.is_string()) parse_fail(key, v, "expected a string");
    return std::get<std::string>(v.data);
}

bool as_bool(const Value& v, const std::string& key) {
    if (!v.is_bool()) parse_fail(key, v, "expected true or false");
    return std::get<bool>(v.data);
}

const Array& as_array(const Value& v, const std::string& key) {
    if (!v.is_array()) parse_fail(key, v, "expected an array");
    return std::get<Array>(v.data);
}

std::int64_t as_integer(const Value& v, const std::string& key) {
    if (!v.is_number()) parse_fail(key, v, "expected an integer");
    std::int64_t out = 0;
    const auto& raw = v.raw;
    const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
    if (ec != std::errc{} || end != raw.data() + raw.size()) parse_fail(key, v, "expected an integer, got '" + raw + "'");
    return out;
}

std::uint64_t as_unsigned(const Value& v, const std::string& key) {
    if (!v.is_number()) parse_fail(key, v, "expected a non-negative integer");
    std::uint64_t out = 0;
    const auto& raw = v.raw;
    const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), out);
    if (ec != std::errc{} || end != raw.data() + raw.size()) {
        parse_fail(key, v, "expected a non-negative integer, got '" + raw + "'");
    }
    return out;
}

// Array of fixed-width rows, e.g. [[t, v, omega], ...].
const Array& row(const Value& v, const std::string& key, std::size_t width) {
    const auto& r = as_array(v, key);
    if (r.size() != width) parse_fail(key, v, "expected " + std::to_string(width) + " elements");
    return r;
}

void reject_unknown(const Table& table, const std::string& section, std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, v] : table.entries) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            parse_fail(section.empty() ? k : section + "." + k, v, "unknown key");
        }
    }
}

template <class F>
void with(const Table& table, std::string_view key, F&& f) {
    if (const Value* v = table.find(key)) f(*v);
}

void read_geometry(const Table& t, RobotGeometry& g) {
    reject_unknown(t, "geometry",
                   {"wheelbase", "track", "wheel_diameter", "wheel_offset", "gear_ratio", "steering_limit_deg"});
    with(t, "wheelbase", [&](const Value& v) { g.wheelbase = as_number(v, "geometry.wheelbase"); });
    with(t, "track", [&](const Value& v) { g.track = as_number(v, "geometry.track"); });
    with(t, "wheel_diameter", [&](const Value& v) { g.wheel_radius = as_number(v, "geometry.wheel_diameter") / 2.0; });
    with(t, "wheel_offset", [&](const Value& v) { g.wheel_offset = as_number(v, "geometry.wheel_offset"); });
    with(t, "gear_ratio", [&](const Value& v) { g.gear_ratio = as_number(v, "geometry.gear_ratio"); });
    with(t, "steering_limit_deg",
         [&](const Value& v) { g.steering_limit = as_number(v, "geometry.steering_limit_deg") * kDegToRad; });
}

void read_plant(const Table& t, PlantParams& p) {
    reject_unknown(t, "plant", {"inertia", "damping", "coulomb", "valve_gain", "mass", "steer_tau", "steer_gain"});
    with(t, "inertia", [&](const Value& v) { p.inertia = as_number(v, "plant.inertia"); });
    with(t, "damping", [&](const Value& v) { p.damping = as_number(v, "plant.damping"); });
    with(t, "coulomb", [&](const Value& v) { p.coulomb = as_number(v, "plant.coulomb"); });
    with(t, "valve_gain", [&](const Value& v) { p.valve_gain = as_number(v, "plant.valve_gain"); });
    with(t, "mass", [&](const Value& v) { p.mass = as_number(v, "plant.mass"); });
    with(t, "steer_tau", [&](const Value& v) { p.steer_tau = as_number(v, "plant.steer_tau"); });
    with(t, "steer_gain", [&](const Value& v) { p.steer_gain = as_number(v, "plant.steer_gain"); });
}

std::size_t wheel_index(const Value& v, const std::string& key) {
    const auto target = parse_fault_target(as_string(v, key));
    if (!target || static_cast<std::size_t>(*target) >= kWheelCount) {
        parse_fail(key, v, "unknown wheel '" + std::get<std::string>(v.data) + "' (expected FR, FL, RR or RL)");
    }
    return static_cast<std::size_t>(*target);
}

void read_environment(const Table& t, Environment& env) {
    reject_unknown(t, "environment", {"slope", "pulses", "noise_amp"});
    with(t, "slope", [&](const Value& v) {
        const auto& rows = as_array(v, "environment.slope");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto key = "environment.slope[" + std::to_string(i) + "]";
            const auto& r = row(rows[i], key, 2);
            env.slope.push_back({as_number(r[0], key + ".t"), as_number(r[1], key + ".grade_deg") * kDegToRad});
        }
    });
    with(t, "pulses", [&](const Value& v) {
        const auto& rows = as_array(v, "environment.pulses");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto key = "environment.pulses[" + std::to_string(i) + "]";
            const auto& r = row(rows[i], key, 4);
            env.pulses.push_back({wheel_index(r[0], key + ".wheel"), as_number(r[1], key + ".t0"),
                                  as_number(r[2], key + ".t1"), as_number(r[3], key + ".torque")});
        }
    });
    with(t, "noise_amp", [&](const Value& v) { env.noise_amp = as_number(v, "environment.noise_amp"); });
}

void read_controller(const Table& t, ControllerGains& g) {
    reject_unknown(t, "controller", {"lambda", "xi", "beta", "kps", "u_limit", "psi0"});
    with(t, "lambda", [&](const Value& v) { g.lambda = as_number(v, "controller.lambda"); });
    with(t, "xi", [&](const Value& v) { g.xi = as_number(v, "controller.xi"); });
    with(t, "beta", [&](const Value& v) { g.beta = as_number(v, "controller.beta"); });
    with(t, "kps", [&](const Value& v) { g.kps = as_number(v, "controller.kps"); });
    with(t, "u_limit", [&](const Value& v) { g.u_limit = as_number(v, "controller.u_limit"); });
    with(t, "psi0", [&](const Value& v) { g.psi0 = as_number(v, "controller.psi0"); });
}

void read_sim(const Table& t, SimSettings& s) {
    reject_unknown(t, "sim", {"dt", "duration", "seed", "plant_substeps", "sensor_delay"});
    with(t, "dt", [&](const Value& v) { s.dt = as_number(v, "sim.dt"); });
    with(t, "duration", [&](const Value& v) { s.duration = as_number(v, "sim.duration"); });
    with(t, "seed", [&](const Value& v) { s.seed = as_unsigned(v, "sim.seed"); });
    with(t, "plant_substeps", [&](const Value& v) {
        const auto n = as_integer(v, "sim.plant_substeps");
        if (n < 1 || n > 100000) {
            throw Error(ErrorCode::Range, "sim.plant_substeps = " + std::to_string(n) + " (must be >= 1)");
        }
        s.plant_substeps = static_cast<int>(n);
    });
    with(t, "sensor_delay", [&](const Value& v) { s.sensor_delay = as_bool(v, "sim.sensor_delay"); });
}

CommandProfile read_command(const Table& t) {
    reject_unknown(t, "command", {"knots"});
    std::vector<CommandKnot> knots;
    with(t, "knots", [&](const Value& v) {
        const auto& rows = as_array(v, "command.knots");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto key = "command.knots[" + std::to_string(i) + "]";
            const auto& r = row(rows[i], key, 3);
            knots.push_back({as_number(r[0], key + ".t"), as_number(r[1], key + ".v"), as_number(r[2], key + ".omega")});
        }
        if (knots.empty()) {
            throw Error(ErrorCode::Profile, "command.knots is empty (at least one knot required)");
        }
    });
    return CommandProfile(std::move(knots));
}

FaultScheduleEntry read_fault(const Table& t, std::size_t i) {
    const auto label = "fault[" + std::to_string(i) + "]";
    reject_unknown(t, label, {"wheel", "channel", "t0", "t1", "epsilon", "sat", "sat_noise"});
    auto required = [&](std::string_view key) -> const Value& {
        const Value* v = t.find(key);
        if (!v) throw Error(ErrorCode::Parse, label + ": missing key '" + std::string(key) + "'");
        return *v;
    };
    FaultScheduleEntry e;
    const Value& wheel = required("wheel");
    const auto target = parse_fault_target(as_string(wheel, label + ".wheel"));
    if (!target) {
        parse_fail(label + ".wheel", wheel,
                   "unknown target '" + std::get<std::string>(wheel.data) + "' (expected FR, FL, RR, RL, front, rear)");
    }
    e.target = *target;
    const Value& channel = required("channel");
    const auto ch = parse_channel(as_string(channel, label + ".channel"));
    if (!ch) parse_fail(label + ".channel", channel, "expected \"sensor\" or \"actuator\"");
    e.channel = *ch;
    e.t_start = as_number(required("t0"), label + ".t0");
    e.t_end = as_number(required("t1"), label + ".t1");
    e.fault.channel = e.channel;
    e.fault.epsilon = as_number(required("epsilon"), label + ".epsilon");
    with(t, "sat", [&](const Value& v) { e.fault.sat = as_number(v, label + ".sat"); });
    with(t, "sat_noise", [&](const Value& v) { e.fault.sat_noise_amp = as_number(v, label + ".sat_noise"); });
    return e;
}

void read_metrics(const Table& t, MetricsSettings& m) {
    reject_unknown(t, "metrics", {"fit_start", "a_bar"});
    with(t, "fit_start", [&](const Value& v) { m.fit_start = as_number(v, "metrics.fit_start"); });
    with(t, "a_bar", [&](const Value& v) {
        const auto& r = row(v, "metrics.a_bar", kWheelCount);
        WheelArray a{};
        for (std::size_t w = 0; w < kWheelCount; ++w) a[w] = as_number(r[w], "metrics.a_bar");
        m.a_bar = a;
    });
}

}  // namespace

CommandProfile::CommandProfile(std::vector<CommandKnot> knots) : knots_(std::move(knots)) {
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const auto& k = knots_[i];
        const auto key = "command.knots[" + std::to_string(i) + "]";
        if (!std::isfinite(k.t) || !std::isfinite(k.v) || !std::isfinite(k.omega)) {
            throw Error(ErrorCode::Range, key + " contains a non-finite value");
        }
        if (i > 0 && !(k.t > knots_[i - 1].t)) {
            throw Error(ErrorCode::Profile, key + ".t = " + format_number(k.t) +
                                                " (knot times must be strictly increasing, previous " +
                                                format_number(knots_[i - 1].t) + ")");
        }
    }
}

BaseCommand command_profile_eval(const CommandProfile& profile, double t) {
    const auto& k = profile.knots();
    if (k.empty()) {
        return {};
    }
    if (t <= k.front().t) {
        return {k.front().v, k.front().omega};
    }
    if (t >= k.back().t) {
        return {k.back().v, k.back().omega};
    }
    const auto hi = std::upper_bound(k.begin(), k.end(), t, [](double value, const CommandKnot& c) { return value < c.t; });
    const auto lo = hi - 1;
    if (t == lo->t) {
        return {lo->v, lo->omega};
    }
    const double w = (t - lo->t) / (hi->t - lo->t);
    return {lo->v + w * (hi->v - lo->v), lo->omega + w * (hi->omega - lo->omega)};
}

std::size_t SimSettings::tick_count() const {
    return static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
}

WheelArray ScenarioConfig::a_bar() const {
    if (metrics.a_bar) {
        return *metrics.a_bar;
    }
    WheelArray a{};
    a.fill(plant.valve_gain * geometry.wheel_radius / plant.inertia);
    return a;
}

void ScenarioConfig::validate() const {
    geometry.validate();
    plant.validate();
    environment.validate();
    gains.validate();
    if (!(sim.dt > 0.0) || !std::isfinite(sim.dt)) {
        throw Error(ErrorCode::Range, "sim.dt = " + format_number(sim.dt) + " (must be > 0)");
    }
    if (!(sim.duration > 0.0) || !std::isfinite(sim.duration)) {
        throw Error(ErrorCode::Range, "sim.duration = " + format_number(sim.duration) + " (must be > 0)");
    }
    if (sim.plant_substeps < 1) {
        throw Error(ErrorCode::Range, "sim.plant_substeps = " + std::to_string(sim.plant_substeps) + " (must be >= 1)");
    }
    if (!(sim.duration / sim.dt < 1e9)) {
        throw Error(ErrorCode::Range, "sim.duration / sim.dt = " + format_number(sim.duration / sim.dt) +
                                          " (too many ticks)");
    }
    if (!(metrics.fit_start >= 0.0) || !std::isfinite(metrics.fit_start)) {
        throw Error(ErrorCode::Range, "metrics.fit_start = " + format_number(metrics.fit_start) + " (must be >= 0)");
    }
    for (double a : a_bar()) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw Error(ErrorCode::Range, "metrics.a_bar = " + format_number(a) + " (must be > 0)");
        }
    }
}

ScenarioConfig load_scenario(std::string_view text) {
    const auto doc = config::parse_document(text);
    ScenarioConfig cfg;
    reject_unknown(doc.root, "", {});
    std::vector<FaultScheduleEntry> faults;
    for (const auto& section : doc.sections) {
        const auto& t = section.table;
        if (section.is_array) {
            if (section.name != "fault") {
                throw Error(ErrorCode::Parse, "line " + std::to_string(section.line) + ": unknown section [[" +
                                                  section.name + "]]");
            }
            faults.push_back(read_fault(t, faults.size()));
            continue;
        }
        if (section.name == "geometry") {
            read_geometry(t, cfg.geometry);
        } else if (section.name == "plant") {
            read_plant(t, cfg.plant);
        } else if (section.name == "environment") {
            read_environment(t, cfg.environment);
        } else if (section.name == "controller") {
            read_controller(t, cfg.gains);
        } else if (section.name == "sim") {
            read_sim(t, cfg.sim);
        } else if (section.name == "command") {
            cfg.command = read_command(t);
        } else if (section.name == "metrics") {
            read_metrics(t, cfg.metrics);
        } else {
            throw Error(ErrorCode::Parse, "line " + std::to_string(section.line) + ": unknown section [" +
                                              section.name + "]");
        }
    }
    cfg.faults = FaultSchedule(std::move(faults));
    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open scenario '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto cfg = load_scenario(buf.str());
    cfg.name = path.stem().string();
    return cfg;
}

}  // namespace wheelftc
