#include "wheelftc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wheelftc/error.hpp"

namespace wheelftc {

namespace {

constexpr std::size_t kMinFitSamples = 100;
constexpr std::size_t kSearchSamples = 4000;
constexpr double kCoverageSlack = 1e-9;

struct Amplitudes {
    double A = 0.0;
    double c = 0.0;
    double sse = 0.0;
};

// Least squares (A, c) for a fixed decay rate subject to A g_i + c >= peak_i,
// A >= 0, c >= 0. For fixed A the best admissible floor is
// max(mean(peak - A g), max(peak - A g), 0), and the resulting residual is
// convex in A, so A is found by ternary search.
Amplitudes bounding_fit(double k, const std::vector<double>& tau, const std::vector<double>& peak,
                        const std::vector<std::size_t>& use) {
    std::vector<double> g(use.size());
    std::vector<double> p(use.size());
    double p_max = 0.0;
    for (std::size_t j = 0; j < use.size(); ++j) {
        g[j] = std::exp(-k * tau[use[j]]);
        p[j] = peak[use[j]];
        p_max = std::max(p_max, p[j]);
    }
    const double n = static_cast<double>(use.size());
    auto evaluate = [&](double A) {
        double mean = 0.0;
        double need = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double rest = p[j] - A * g[j];
            mean += rest;
            need = std::max(need, rest);
        }
        Amplitudes out;
        out.A = A;
        out.c = std::max(mean / n, need);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double r = A * g[j] + out.c - p[j];
            out.sse += r * r;
        }
        return out;
    };
    double lo = 0.0;
    double hi = 4.0 * p_max / std::max(g.front(), 1e-300);
    hi = std::min(hi, 1e6 * std::max(p_max, 1e-300));
    for (int it = 0; it < 90 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (evaluate(m1).sse <= evaluate(m2).sse) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    auto best = evaluate(0.5 * (lo + hi));
    const auto at_zero = evaluate(0.0);
    return at_zero.sse < best.sse ? at_zero : best;
}

}  // namespace

Series error_norm_series(const Telemetry& telemetry, ErrorSource source) {
    Series s;
    s.t.reserve(telemetry.size());
    s.value.reserve(telemetry.size());
    for (const auto& row : telemetry) {
        double sum = 0.0;
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            const double v = source == ErrorSource::True ? row.v_actual[w] : row.v_meas[w];
            const double e = v - row.v_cmd[w];
            sum += e * e;
        }
        s.t.push_back(row.t);
        s.value.push_back(std::sqrt(sum));
    }
    return s;
}

double lyapunov_value(const WheelArray& e, const WheelArray& psi, const WheelArray& a_bar) {
    double weighted = 0.0;
    double adaptive = 0.0;
    for (std::size_t w = 0; w < kWheelCount; ++w) {
        weighted += e[w] * e[w] / a_bar[w];
        adaptive += psi[w] * psi[w];
    }
    return 0.5 * (weighted + adaptive);
}

Series lyapunov_series(const Telemetry& telemetry, const WheelArray& a_bar) {
    Series s;
    s.t.reserve(telemetry.size());
    s.value.reserve(telemetry.size());
    for (const auto& row : telemetry) {
        WheelArray e{};
        for (std::size_t w = 0; w < kWheelCount; ++w) e[w] = row.v_actual[w] - row.v_cmd[w];
        s.t.push_back(row.t);
        s.value.push_back(lyapunov_value(e, row.psi, a_bar));
    }
    return s;
}

double lambda_min_weight(const WheelArray& a_bar) {
    double out = std::numeric_limits<double>::infinity();
    for (double a : a_bar) out = std::min(out, 1.0 / a);
    return out;
}

double EnvelopeFit::at(double t) const { return A * std::exp(-k * (t - t0)) + c; }

EnvelopeFit fit_exponential_envelope(const Series& series, double t_fit_start) {
    std::size_t first = 0;
    while (first < series.size() && series.t[first] < t_fit_start - 1e-12) ++first;
    const std::size_t n = series.size() - first;
    if (n < kMinFitSamples) {
        throw Error(ErrorCode::Range, "envelope fit needs at least " + std::to_string(kMinFitSamples) +
                                          " samples after t = " + format_number(t_fit_start) + ", got " +
                                          std::to_string(n));
    }

    EnvelopeFit fit;
    fit.t0 = series.t[first];
    std::vector<double> tau(n), peak(n), raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        tau[i] = series.t[first + i] - fit.t0;
        raw[i] = series.value[first + i];
    }
    double running = -std::numeric_limits<double>::infinity();
    for (std::size_t i = n; i-- > 0;) {
        running = std::max(running, raw[i]);
        peak[i] = running;
    }

    auto coverage = [&](const EnvelopeFit& f) {
        std::size_t inside = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double bound = f.A * std::exp(-f.k * tau[i]) + f.c;
            if (raw[i] <= bound * (1.0 + kCoverageSlack) + std::numeric_limits<double>::min()) ++inside;
        }
        return static_cast<double>(inside) / static_cast<double>(n);
    };

    const double pmax = peak.front();
    const double pmin = peak.back();
    if (pmax - pmin <= 1e-12 * std::max(1.0, std::abs(pmax))) {
        fit.A = 0.0;
        fit.k = 0.0;
        fit.c = pmax;
        fit.degenerate = true;
        fit.coverage = coverage(fit);
        return fit;
    }

    std::vector<std::size_t> subset;
    const std::size_t stride = std::max<std::size_t>(1, n / kSearchSamples);
    for (std::size_t i = 0; i < n; i += stride) subset.push_back(i);
    if (subset.back() != n - 1) subset.push_back(n - 1);

    const double span = tau.back();
    const double spacing = span / static_cast<double>(n - 1);
    const double log_lo = std::log(1e-3 / span);
    const double log_hi = std::log(std::max(10.0 / span, 0.5 / spacing));
    constexpr int kGrid = 120;
    auto objective = [&](double log_k) { return bounding_fit(std::exp(log_k), tau, peak, subset).sse; };

    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int g = 0; g < kGrid; ++g) {
        const double lk = log_lo + (log_hi - log_lo) * g / (kGrid - 1);
        const double s = objective(lk);
        if (s < best_sse) {
            best_sse = s;
            best = g;
        }
    }
    const double step = (log_hi - log_lo) / (kGrid - 1);
    double a = log_lo + step * std::max(0, best - 1);
    double b = log_lo + step * std::min(kGrid - 1, best + 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 70 && (b - a) > 1e-12; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    fit.k = std::exp(0.5 * (a + b));

    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    const auto amp = bounding_fit(fit.k, tau, peak, all);
    fit.A = amp.A;
    fit.c = amp.c;
    fit.coverage = coverage(fit);
    return fit;
}

SummaryMetrics summary_metrics(const Telemetry& telemetry, double t_start) {
    SummaryMetrics m;
    double err_sum = 0.0;
    double effort_sum = 0.0;
    std::size_t count = 0;
    for (const auto& row : telemetry) {
        if (row.t < t_start - 1e-12) continue;
        for (std::size_t w = 0; w < kWheelCount; ++w) {
            const double e = std::abs(row.v_actual[w] - row.v_cmd[w]);
            err_sum += e;
            effort_sum += std::abs(row.u_a[w]);
            m.max_abs_error[w] = std::max(m.max_abs_error[w], e);
        }
        ++count;
    }
    if (count > 0) {
        const double denom = static_cast<double>(count * kWheelCount);
        m.avg_tracking_error = err_sum / denom;
        m.avg_control_effort = effort_sum / denom;
    }
    return m;
}

double transient_end(const EnvelopeFit& fit) {
    if (fit.A > fit.c && fit.c > 0.0 && fit.k > 0.0) {
        return fit.t0 + std::log(fit.A / fit.c) / fit.k;
    }
    return fit.t0;
}

double lyapunov_bound_fraction(const Series& v, const EnvelopeFit& fit, double t_start) {
    t_start = std::max(t_start, transient_end(fit));
    std::size_t total = 0;
    std::size_t ok = 0;
    const double sigma = fit.k * fit.c;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v.t[i] < t_start - 1e-12) continue;
        const double dt = v.t[i + 1] - v.t[i];
        const double bound = v.value[i] * std::exp(-fit.k * dt) + sigma * dt;
        ++total;
        if (v.value[i + 1] <= bound * (1.0 + kCoverageSlack) + std::numeric_limits<double>::min()) ++ok;
    }
    return total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
}

LyapunovDiagnostics lyapunov_diagnostics(const Telemetry& telemetry, const WheelArray& a_bar, double t_fit_start) {
    LyapunovDiagnostics d;
    d.a_bar = a_bar;
    d.v_series = lyapunov_series(telemetry, a_bar);
    const auto fit = fit_exponential_envelope(d.v_series, t_fit_start);
    d.eta_fit = fit.k;
    d.sigma_over_eta_fit = fit.c;
    d.transient_end = transient_end(fit);
    d.bound_fraction = lyapunov_bound_fraction(d.v_series, fit, t_fit_start);
    return d;
}

}  // namespace wheelftc
