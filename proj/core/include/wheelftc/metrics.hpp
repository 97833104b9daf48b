#pragma once

#include <optional>
#include <vector>

#include "wheelftc/kinematics.hpp"
#include "wheelftc/telemetry.hpp"

namespace wheelftc {

struct Series {
    std::vector<double> t;
    std::vector<double> value;

    std::size_t size() const noexcept { return t.size(); }
};

enum class ErrorSource {
    True,      // v_actual - v_cmd
    Measured,  // v_meas - v_cmd, corrupted by sensor faults
};

/// Per-tick Euclidean norm of the four wheel speed errors.
Series error_norm_series(const Telemetry& telemetry, ErrorSource source = ErrorSource::True);

/// V = 1/2 (sum e_i^2 / a_bar_i + sum psi_i^2).
double lyapunov_value(const WheelArray& e, const WheelArray& psi, const WheelArray& a_bar);
Series lyapunov_series(const Telemetry& telemetry, const WheelArray& a_bar);

/// Smallest eigenvalue of diag(1 / a_bar).
double lambda_min_weight(const WheelArray& a_bar);

/// Upper envelope  A exp(-k (t - t0)) + c.
struct EnvelopeFit {
    double A = 0.0;
    double k = 0.0;
    double c = 0.0;
    double t0 = 0.0;
    double coverage = 0.0;     // fraction of samples at or below the envelope
    bool degenerate = false;   // peak sequence was constant

    double at(double t) const;
};

/// Fits the envelope to the suffix-maximum (peak) sequence of the samples with
/// t >= t_fit_start. For each decay rate k, (A, c) minimise the squared residual
/// to the peaks subject to the curve bounding every peak; k is then chosen by a
/// log-spaced scan refined with golden-section search. Needs at least 100
/// samples (Error(Range) otherwise).
/// A constant peak sequence yields A = 0, k = 0, c = that constant and sets
/// `degenerate`.
EnvelopeFit fit_exponential_envelope(const Series& series, double t_fit_start);

struct SummaryMetrics {
    double avg_tracking_error = 0.0;  // mean |v_actual - v_cmd| over ticks and wheels
    double avg_control_effort = 0.0;  // mean |u_a| over ticks and wheels
    WheelArray max_abs_error{};
};

SummaryMetrics summary_metrics(const Telemetry& telemetry, double t_start = 0.0);

struct LyapunovDiagnostics {
    WheelArray a_bar{};
    Series v_series;
    double eta_fit = 0.0;             // decay rate of the V envelope
    double sigma_over_eta_fit = 0.0;  // residual level of the V envelope
    double transient_end = 0.0;       // s, see transient_end()
    double bound_fraction = 0.0;      // post-transient ticks obeying V[n+1] <= V[n] e^{-eta dt} + sigma dt
    std::optional<double> f_star;     // max |F_i / a_bar_i|, plant-side estimate
    std::optional<double> d_star;     // max |D_i / a_bar_i|, plant-side estimate
};

/// Time after which the exponential part of the envelope is below its floor,
/// A exp(-k (t - t0)) <= c.
double transient_end(const EnvelopeFit& fit);

/// Fraction of consecutive post-transient sample pairs (t >= max(t_start,
/// transient_end(fit))) satisfying the discrete bound with eta = fit.k and
/// sigma = fit.k * fit.c.
double lyapunov_bound_fraction(const Series& v, const EnvelopeFit& fit, double t_start);

LyapunovDiagnostics lyapunov_diagnostics(const Telemetry& telemetry, const WheelArray& a_bar, double t_fit_start);

}  // namespace wheelftc
