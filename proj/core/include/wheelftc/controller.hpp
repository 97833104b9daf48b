#pragma once

#include "wheelftc/kinematics.hpp"

namespace wheelftc {

/// Gains of the model-free drive law and the steering P loop.
struct ControllerGains {
    double lambda = 1.0;   // speed-magnitude gain
    double xi = 1.0;       // adaptive decay floor, m/s scale
    double beta = 0.001;   // 1/s
    double kps = 1.0;      // steering proportional gain
    double u_limit = 1.0;  // valve command saturation
    double psi0 = 1.0;     // initial adaptive parameter

    void validate() const;
};

/// Exact one-tick solution of psi' = -(beta + xi + |v_cmd| + |v_meas|) psi
/// with the coefficient frozen over the tick.
double adaptive_update(double psi, double v_cmd, double v_meas, const ControllerGains& gains, double dt);

/// Drive valve command: sgn*(v_cmd) * (lambda (|v_cmd| - |v_meas|) + psi^2),
/// saturated at +-u_limit. sgn*(0) = +1.
double drive_control(double v_meas, double v_cmd, double psi, const ControllerGains& gains);

/// Steering valve command kps * (phi_cmd - phi_meas), saturated at +-u_limit.
double steering_control(double phi_cmd, double phi_meas, const ControllerGains& gains);

struct ControllerState {
    WheelArray psi{};

    static ControllerState initial(const ControllerGains& gains) {
        ControllerState s;
        s.psi.fill(gains.psi0);
        return s;
    }
};

}  // namespace wheelftc
