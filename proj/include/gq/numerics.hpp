// Shared numerical kernels: quadrature, adaptive RK4, finite differences,
// deterministic sampling.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace gq {

using Complex = std::complex<double>;
using Point = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Base class for all library errors.
struct error : std::runtime_error {
    explicit error(const std::string& what) : std::runtime_error(what) {}
};

struct invalid_spec_error : error {
    using error::error;
};

/// Thrown when an ODE driver cannot reach the requested tolerance.
struct nonconvergence_error : error {
    nonconvergence_error(const std::string& what, double achieved)
        : error(what + " (achieved residual " + std::to_string(achieved) + ")"),
          achieved_residual(achieved) {}
    double achieved_residual;
};

/// Tunable tolerances shared by the operator and holonomy machinery.
struct NumericsConfig {
    double fd_step = 1e-5;        // central-difference step along generator flows
    int quadrature_steps = 2048;  // Simpson intervals per period integral
    double ode_tol = 1e-10;       // global tolerance of the RK4 transport driver
    double eq_tol = 1e-6;         // assertion tolerance for operator identities

    void validate() const {
        if (!(fd_step > 0.0) || !(ode_tol > 0.0) || !(eq_tol > 0.0))
            throw invalid_spec_error("NumericsConfig: steps and tolerances must be positive");
        if (quadrature_steps < 16)
            throw invalid_spec_error("NumericsConfig: quadrature_steps must be >= 16");
    }
};

/// Composite Simpson rule on [0, length]. The node count is rounded up to an
/// even interval count. Accumulates in extended precision; the integrands here
/// are smooth and periodic, so this converges fast even near short periods.
inline Complex simpson(const std::function<Complex(double)>& f, double length, int intervals) {
    if (length == 0.0) return Complex(0.0, 0.0);
    int n = intervals;
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    const double h = length / n;
    long double re = 0.0L, im = 0.0L;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const Complex v = f(h * i);
        re += static_cast<long double>(w) * v.real();
        im += static_cast<long double>(w) * v.imag();
    }
    const long double scale = static_cast<long double>(h) / 3.0L;
    return Complex(static_cast<double>(re * scale), static_cast<double>(im * scale));
}

namespace detail {

inline std::vector<double> rk4_step(const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
                                    double t, const std::vector<double>& y, double h) {
    const size_t m = y.size();
    std::vector<double> k1 = f(t, y), tmp(m), k2, k3, k4;
    for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = f(t + 0.5 * h, tmp);
    for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = f(t + 0.5 * h, tmp);
    for (size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = f(t + h, tmp);
    std::vector<double> out(m);
    for (size_t i = 0; i < m; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

}  // namespace detail

struct OdeResult {
    std::vector<double> state;
    double error_estimate = 0.0;  // accumulated step-doubling estimate
    int steps = 0;
};

/// Adaptive RK4 with step doubling. Integrates y' = f(t, y) from t0 to t1,
/// keeping the accumulated local error below tol. Throws nonconvergence_error
/// when the step size underflows before tolerance is met.
inline OdeResult integrate_rk4(const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
                               std::vector<double> y, double t0, double t1, double tol,
                               int max_steps = 200000) {
    OdeResult res;
    const double total = t1 - t0;
    if (total == 0.0) {
        res.state = std::move(y);
        return res;
    }
    double t = t0;
    double h = total / 64.0;
    const double hmin = std::abs(total) * 1e-14;
    while ((total > 0 ? t < t1 : t > t1)) {
        if ((total > 0 && t + h > t1) || (total < 0 && t + h < t1)) h = t1 - t;
        std::vector<double> full = detail::rk4_step(f, t, y, h);
        std::vector<double> half = detail::rk4_step(f, t, y, 0.5 * h);
        half = detail::rk4_step(f, t + 0.5 * h, half, 0.5 * h);
        double err = 0.0, ynorm = 0.0;
        for (size_t i = 0; i < y.size(); ++i) {
            err = std::max(err, std::abs(full[i] - half[i]));
            ynorm = std::max(ynorm, std::abs(y[i]));
        }
        err /= 15.0;
        // proportional budget with a rounding floor, so step control does not
        // chase machine noise below representable accuracy
        const double budget = std::max(tol * std::abs(h / total), 1e-15 * (1.0 + ynorm));
        if (err <= budget || std::abs(h) <= hmin) {
            if (err > budget)
                throw nonconvergence_error("integrate_rk4: step size underflow", err);
            t += h;
            y = std::move(half);
            res.error_estimate += err;
            if (++res.steps > max_steps)
                throw nonconvergence_error("integrate_rk4: step budget exhausted", res.error_estimate);
            if (err < 0.1 * budget) h *= 2.0;
        } else {
            h *= 0.5;
        }
    }
    res.state = std::move(y);
    return res;
}

/// Deterministic uniform sampler. The raw engine output is mapped to doubles
/// by hand so reports are reproducible for a fixed seed.
struct Rng {
    explicit Rng(uint64_t seed) : eng(seed) {}
    std::mt19937_64 eng;

    double uniform01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }
    int uniform_int(int a, int b) {  // inclusive bounds
        return a + static_cast<int>(eng() % static_cast<uint64_t>(b - a + 1));
    }
};

}  // namespace gq
