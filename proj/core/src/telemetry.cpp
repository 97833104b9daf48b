#include "wheelftc/telemetry.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

constexpr const char* kWheelNames[kWheelCount] = {"fr", "fl", "rr", "rl"};
constexpr const char* kAxleNames[kAxleCount] = {"front", "rear"};

template <std::size_t N>
void push(std::vector<double>& out, const std::array<double, N>& a) {
    out.insert(out.end(), a.begin(), a.end());
}

template <std::size_t N>
void take(std::array<double, N>& a, const std::vector<double>& v, std::size_t& pos) {
    for (std::size_t i = 0; i < N; ++i) a[i] = v[pos++];
}

}  // namespace

std::vector<std::string> telemetry_header() {
    std::vector<std::string> h{"t"};
    for (const char* field : {"v_cmd", "v_actual", "v_meas", "u_a", "u_v", "psi"}) {
        for (const char* w : kWheelNames) h.push_back(std::string(field) + "_" + w);
    }
    for (const char* field : {"phi_cmd", "phi_meas", "u_s"}) {
        for (const char* a : kAxleNames) h.push_back(std::string(field) + "_" + a);
    }
    h.push_back("non_operable_mask");
    return h;
}

std::vector<double> flatten(const TelemetryRow& row) {
    std::vector<double> out;
    out.reserve(kTelemetryColumns);
    out.push_back(row.t);
    push(out, row.v_cmd);
    push(out, row.v_actual);
    push(out, row.v_meas);
    push(out, row.u_a);
    push(out, row.u_v);
    push(out, row.psi);
    push(out, row.phi_cmd);
    push(out, row.phi_meas);
    push(out, row.u_s);
    out.push_back(static_cast<double>(row.non_operable_mask));
    return out;
}

void write_telemetry_csv(std::ostream& out, const Telemetry& telemetry) {
    const auto header = telemetry_header();
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << '\n';
    std::string line;
    for (const auto& row : telemetry) {
        line.clear();
        const auto values = flatten(row);
        for (std::size_t i = 0; i + 1 < values.size(); ++i) {
            if (i) line.push_back(',');
            line += format_number(values[i]);
        }
        line.push_back(',');
        line += std::to_string(row.non_operable_mask);
        line.push_back('\n');
        out << line;
    }
}

Telemetry read_telemetry_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::Parse, "empty telemetry");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string expected;
    for (const auto& h : telemetry_header()) expected += (expected.empty() ? "" : ",") + h;
    if (line != expected) {
        throw Error(ErrorCode::Parse, "line 1: telemetry header does not match the expected columns");
    }
    Telemetry out;
    std::size_t line_no = 1;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        values.clear();
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            const auto field = rest.substr(0, comma);
            double v = 0.0;
            const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (ec != std::errc{} || end != field.data() + field.size()) {
                throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + " (row " +
                                                  std::to_string(line_no - 1) + "): bad number '" +
                                                  std::string(field) + "'");
            }
            values.push_back(v);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (values.size() != kTelemetryColumns) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + " (row " + std::to_string(line_no - 1) +
                                              "): expected " + std::to_string(kTelemetryColumns) + " fields, got " +
                                              std::to_string(values.size()) + " (truncated?)");
        }
        TelemetryRow row;
        std::size_t pos = 0;
        row.t = values[pos++];
        take(row.v_cmd, values, pos);
        take(row.v_actual, values, pos);
        take(row.v_meas, values, pos);
        take(row.u_a, values, pos);
        take(row.u_v, values, pos);
        take(row.psi, values, pos);
        take(row.phi_cmd, values, pos);
        take(row.phi_meas, values, pos);
        take(row.u_s, values, pos);
        row.non_operable_mask = static_cast<std::uint32_t>(values[pos]);
        out.push_back(row);
    }
    if (out.empty()) {
        throw Error(ErrorCode::Parse, "empty telemetry");
    }
    return out;
}

}  // namespace wheelftc
