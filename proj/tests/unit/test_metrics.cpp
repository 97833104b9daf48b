#include <cmath>
#include <random>

#include "doctest.h"
#include "wheelftc/error.hpp"
#include "wheelftc/metrics.hpp"

#ifdef WHEELFTC_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace wheelftc;

namespace {

Series sampled(double t_end, double dt, double (*f)(double)) {
    Series s;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        s.t.push_back(t);
        s.value.push_back(f(t));
    }
    return s;
}

TelemetryRow row_with_error(double t, const WheelArray& e) {
    TelemetryRow r;
    r.t = t;
    r.v_cmd.fill(0.36);
    for (std::size_t w = 0; w < kWheelCount; ++w) r.v_actual[w] = 0.36 + e[w];
    r.v_meas = r.v_actual;
    return r;
}

}  // namespace

TEST_CASE("error norm") {
    Telemetry tel{row_with_error(0.0, {0.03, 0.0, 0.04, 0.0}), row_with_error(0.001, {0, 0, 0, 0})};
    const auto s = error_norm_series(tel);
    CHECK(s.value[0] == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(s.value[1] == 0.0);
    tel[1].v_meas[0] += 0.02;
    CHECK(error_norm_series(tel, ErrorSource::Measured).value[1] == doctest::Approx(0.02));
    CHECK(error_norm_series(tel, ErrorSource::True).value[1] == 0.0);
}

TEST_CASE("lyapunov value") {
    const WheelArray ones{1, 1, 1, 1};
    CHECK(lyapunov_value({0, 0, 0, 0}, {0, 0, 0, 0}, ones) == 0.0);
    CHECK(lyapunov_value({1, 0, 0, 0}, {0, 0, 0, 0}, {2, 1, 1, 1}) == doctest::Approx(0.25));
    const WheelArray e{0.1, -0.2, 0.05, 0.3};
    const WheelArray psi{0.5, 0.1, -0.2, 0.0};
    const WheelArray a{106.75, 50, 80, 120};
    WheelArray e2{}, p2{};
    for (std::size_t i = 0; i < 4; ++i) {
        e2[i] = 2 * e[i];
        p2[i] = 2 * psi[i];
    }
    CHECK(lyapunov_value(e2, p2, a) == doctest::Approx(4 * lyapunov_value(e, psi, a)).epsilon(1e-14));
    CHECK(lyapunov_value({0, 0, 0, 0}, {0, 0, 1e-9, 0}, a) > 0.0);
    CHECK(lyapunov_value({0, 1e-9, 0, 0}, {0, 0, 0, 0}, a) > 0.0);
}

TEST_CASE("smallest weight eigenvalue") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> dist(0.5, 500.0);
    for (int trial = 0; trial < 200; ++trial) {
        const WheelArray a{dist(rng), dist(rng), dist(rng), dist(rng)};
        const double got = lambda_min_weight(a);
#ifdef WHEELFTC_HAVE_EIGEN
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        for (int i = 0; i < 4; ++i) m(i, i) = 1.0 / a[static_cast<std::size_t>(i)];
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(m);
        CHECK(got == doctest::Approx(solver.eigenvalues().minCoeff()).epsilon(1e-12));
#else
        double lo = 1e300;
        for (double x : a) lo = std::min(lo, 1.0 / x);
        CHECK(got == lo);
#endif
    }
}

TEST_CASE("envelope recovers an exact decaying exponential") {
    const auto s = sampled(10.0, 0.01, [](double t) { return 0.5 * std::exp(-0.8 * t); });
    const auto fit = fit_exponential_envelope(s, 0.0);
    CHECK(fit.A == doctest::Approx(0.5).epsilon(0.01));
    CHECK(fit.k == doctest::Approx(0.8).epsilon(0.01));
    CHECK(fit.c <= 0.005);
    CHECK(fit.coverage >= 0.99);
    CHECK_FALSE(fit.degenerate);
}

TEST_CASE("envelope with a residual floor and oscillation") {
    const auto s = sampled(20.0, 0.001, [](double t) {
        return 1.2 * std::exp(-1.5 * t) * (0.75 + 0.25 * std::cos(30 * t)) + 0.01 * (1 + std::sin(7 * t)) / 2;
    });
    const auto fit = fit_exponential_envelope(s, 0.0);
    CHECK(fit.k > 0.5);
    CHECK(fit.k < 5.0);
    CHECK(fit.c == doctest::Approx(0.01).epsilon(0.2));
    CHECK(fit.coverage >= 0.99);
    CHECK(fit.A >= 0.0);
}

TEST_CASE("constant series is degenerate") {
    const auto s = sampled(5.0, 0.01, [](double) { return 0.02; });
    const auto fit = fit_exponential_envelope(s, 0.0);
    CHECK(fit.degenerate);
    CHECK(fit.A == 0.0);
    CHECK(fit.k == 0.0);
    CHECK(fit.c == 0.02);
    CHECK(fit.coverage == 1.0);
}

TEST_CASE("envelope needs enough samples") {
    const auto s = sampled(1.0, 0.01, [](double t) { return std::exp(-t); });
    CHECK_THROWS_AS(fit_exponential_envelope(s, 0.5), Error);
    CHECK_NOTHROW(fit_exponential_envelope(s, 0.0));
    const auto late = fit_exponential_envelope(sampled(10.0, 0.01, [](double t) { return std::exp(-t); }), 2.0);
    CHECK(late.t0 == doctest::Approx(2.0));
    CHECK(late.A == doctest::Approx(std::exp(-2.0)).epsilon(0.01));
}

TEST_CASE("summary averages") {
    Telemetry tel;
    for (int i = 0; i < 10; ++i) {
        auto r = row_with_error(i * 0.1, {0.02, -0.02, 0.02, -0.02});
        r.u_a = {0.1, -0.1, 0.3, -0.3};
        tel.push_back(r);
    }
    const auto m = summary_metrics(tel);
    CHECK(m.avg_tracking_error == doctest::Approx(0.02));
    CHECK(m.avg_control_effort == doctest::Approx(0.2));
    CHECK(m.max_abs_error[1] == doctest::Approx(0.02));

    Telemetry still(5);
    const auto z = summary_metrics(still);
    CHECK(z.avg_tracking_error == 0.0);
    CHECK(z.avg_control_effort == 0.0);

    tel[0].v_actual[0] = 10.0;
    CHECK(summary_metrics(tel, 0.05).avg_tracking_error == doctest::Approx(0.02));
}

TEST_CASE("discrete lyapunov bound on an exact decay") {
    Series v = sampled(10.0, 0.001, [](double t) { return 2.0 * std::exp(-3.0 * t) + 0.001; });
    EnvelopeFit fit;
    fit.A = 2.0;
    fit.k = 3.0;
    fit.c = 0.001;
    CHECK(transient_end(fit) == doctest::Approx(std::log(2000.0) / 3.0));
    // V' = -3 (V - c) means V' <= -k V + k c holds with equality
    CHECK(lyapunov_bound_fraction(v, fit, 0.0) == 1.0);
    fit.k = 6.0;
    CHECK(lyapunov_bound_fraction(v, fit, 0.0) < 0.9);
}
