#include "wheelftc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

void require_positive(double value, const char* key) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw Error(ErrorCode::Range,
                    std::string("controller.") + key + " = " + format_number(value) + " (must be > 0)");
    }
}

double saturate(double u, double limit) {
    if (std::isnan(u)) {
        return 0.0;
    }
    return std::clamp(u, -limit, limit);
}

}  // namespace

void ControllerGains::validate() const {
    require_positive(lambda, "lambda");
    require_positive(xi, "xi");
    require_positive(beta, "beta");
    require_positive(kps, "kps");
    require_positive(u_limit, "u_limit");
    if (!std::isfinite(psi0)) {
        throw Error(ErrorCode::Range, "controller.psi0 = " + format_number(psi0) + " (must be finite)");
    }
}

double adaptive_update(double psi, double v_cmd, double v_meas, const ControllerGains& gains, double dt) {
    const double rate = gains.beta + gains.xi + std::abs(v_cmd) + std::abs(v_meas);
    return psi * std::exp(-rate * dt);
}

double drive_control(double v_meas, double v_cmd, double psi, const ControllerGains& gains) {
    const double raw = -gains.lambda * std::abs(v_meas) + gains.lambda * std::abs(v_cmd) + psi * psi;
    const double direction = v_cmd >= 0.0 ? 1.0 : -1.0;
    return saturate(direction * raw, gains.u_limit);
}

double steering_control(double phi_cmd, double phi_meas, const ControllerGains& gains) {
    return saturate(gains.kps * (phi_cmd - phi_meas), gains.u_limit);
}

}  // namespace wheelftc
