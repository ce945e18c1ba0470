// Holonomy of circle orbits (closed formula and parallel-transport oracle),
// the almost-homotopy operator J_X, the homotopy identity, exactness
// construction where the holonomy is nontrivial, and division of functions
// vanishing on the trivial-holonomy set.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gq/forms.hpp"
#include "gq/model.hpp"
#include "gq/numerics.hpp"

namespace gq {

struct holonomy_trivial_error : error {
    using error::error;
};

struct division_obstruction_error : error {
    using error::error;
};

/// Unit-modulus holonomy of a closed orbit, with the orbit data that produced
/// it. Fixed points carry value 1 and period 0.
struct Holonomy {
    Complex value{1.0, 0.0};
    double period = 0.0;
    double hamiltonian_value = 0.0;
    bool fixed_point = false;
};

struct OrbitSample {
    Point base_point;
    VectorFieldId generator;
};

/// Q = exp(i * per * Theta(X)) on the orbit through the sample point. The
/// parameter period of elliptic rotations depends on the reporting convention.
inline Holonomy holonomy_formula(const Model& model, const OrbitSample& orbit,
                                 DiskConvention conv = DiskConvention::TransportOracle) {
    const int g = orbit.generator.index;
    Holonomy h;
    h.hamiltonian_value = model.hamiltonian(g, orbit.base_point);
    const PeriodInfo per = model.period(g, orbit.base_point);
    if (per.fixed_point) {
        h.fixed_point = true;
        return h;
    }
    h.period = per.value;
    const double parameter_period = model.holonomy_parameter_period(g, orbit.base_point, conv);
    h.value = std::exp(Complex(0.0, parameter_period * h.hamiltonian_value));
    return h;
}

/// Integrates the parallel transport equation df/dt = i f Theta(orbit'(t))
/// around one geometric period, propagating the orbit position by RK4 as
/// well, and returns f(per)/f(0). Serves as the numerical oracle for
/// holonomy_formula.
inline Holonomy holonomy_transport(const Model& model, const OrbitSample& orbit,
                                   const NumericsConfig& cfg) {
    cfg.validate();
    const int g = orbit.generator.index;
    Holonomy h;
    h.hamiltonian_value = model.hamiltonian(g, orbit.base_point);
    const PeriodInfo per = model.period(g, orbit.base_point);
    if (per.fixed_point) {
        h.fixed_point = true;
        return h;
    }
    h.period = per.value;

    const int dim = model.dim();
    std::vector<double> state(dim + 2);
    for (int i = 0; i < dim; ++i) state[i] = orbit.base_point[i];
    state[dim] = 1.0;      // Re f
    state[dim + 1] = 0.0;  // Im f

    auto rhs = [&model, g, dim](double, const std::vector<double>& y) {
        Point p(y.begin(), y.begin() + dim);
        std::vector<double> v = model.generator(g, p);
        const double theta = model.theta(p, v);
        std::vector<double> dy(dim + 2);
        for (int i = 0; i < dim; ++i) dy[i] = v[i];
        dy[dim] = -theta * y[dim + 1];
        dy[dim + 1] = theta * y[dim];
        return dy;
    };
    const OdeResult res = integrate_rk4(rhs, state, 0.0, per.value, cfg.ode_tol);
    h.value = Complex(res.state[dim], res.state[dim + 1]);
    return h;
}

/// The almost-homotopy operator J_X = i_X (integral over one period of the
/// twisted pullback), assembled as a form whose coefficients evaluate by
/// composite Simpson quadrature. Fixed points yield zero.
inline PolarisedForm homotopy_form(const VectorFieldId& X, const PolarisedForm& a,
                                   const NumericsConfig& cfg) {
    cfg.validate();
    if (a.degree() < 1) throw error("homotopy operator: input degree must be >= 1");
    const auto& model = a.model();
    const int g = X.index;
    if (!model->is_circle_generator(g))
        throw error("homotopy operator: generator " + std::to_string(g) + " is not a circle generator");

    PolarisedForm out(model, a.degree() - 1);
    out.set_fd_depth(a.fd_depth());
    auto shared = std::make_shared<const PolarisedForm>(a);
    for (const auto& [idx, c] : a.coefficients()) {
        const auto pos = std::find(idx.begin(), idx.end(), g);
        if (pos == idx.end()) continue;
        const int m = static_cast<int>(pos - idx.begin());
        MultiIndex J = idx;
        J.erase(J.begin() + m);
        const double sign = m % 2 == 0 ? 1.0 : -1.0;
        Coefficient cc;
        cc.value = [model, g, sign, v = c.value, cfg](const Point& p) -> Complex {
            const PeriodInfo per = model->period(g, p);
            if (per.fixed_point) return {};
            const double H = model->hamiltonian(g, p);
            auto integrand = [&](double t) {
                return std::exp(Complex(0.0, -t * H)) * v(model->flow_raw(g, p, t));
            };
            return sign * simpson(integrand, per.value, cfg.quadrature_steps);
        };
        out.set_coefficient(J, std::move(cc));
    }
    return out;
}

/// J_X(a) evaluated at a point.
inline FormValue homotopy_operator(const VectorFieldId& X, const PolarisedForm& a, const Point& p,
                                   const NumericsConfig& cfg) {
    if (a.degree() >= 1 && a.identically_zero()) {
        FormValue v;
        v.degree = a.degree() - 1;
        return v;
    }
    return homotopy_form(X, a, cfg).evaluate(p);
}

namespace detail {

inline Complex holonomy_minus_one_inverse_factor(const Model& model, int g, const Point& p) {
    // Q^{-1} - 1 at p with the geometric (transport) period; the homotopy
    // identity is a statement about actual parallel transport.
    const PeriodInfo per = model.period(g, p);
    if (per.fixed_point) return {};
    const double H = model.hamiltonian(g, p);
    return std::exp(Complex(0.0, -per.value * H)) - Complex(1.0, 0.0);
}

}  // namespace detail

/// Max coefficient magnitude of [Q^{-1}-1]a - (J_X(d a) + d J_X(a)) at p; the
/// degree-0 variant drops the second term.
inline double homotopy_identity_residual(const VectorFieldId& X, const PolarisedForm& a,
                                         const Point& p, const NumericsConfig& cfg) {
    const auto& model = a.model();
    const int g = X.index;
    const Complex qfac = detail::holonomy_minus_one_inverse_factor(*model, g, p);

    FormValue lhs = a.evaluate(p);
    for (auto& [idx, z] : lhs.coeffs) z *= qfac;

    const PolarisedForm da = covariant_derivative(a, cfg);
    FormValue rhs = homotopy_operator(X, da, p, cfg);
    if (a.degree() >= 1) {
        const FormValue second = covariant_derivative(homotopy_form(X, a, cfg), cfg).evaluate(p);
        for (const auto& [idx, z] : second.coeffs) rhs.coeffs[idx] += z;
    }
    return max_difference(lhs, rhs);
}

/// The potential candidate beta = J_X(a) / (Q^{-1} - 1) as a form; evaluating
/// it near holonomy-trivial points is the caller's responsibility.
inline PolarisedForm exactness_potential_form(const VectorFieldId& X, const PolarisedForm& a,
                                              const NumericsConfig& cfg) {
    const auto& model = a.model();
    const int g = X.index;
    PolarisedForm j = homotopy_form(X, a, cfg);
    PolarisedForm out(model, j.degree());
    out.set_fd_depth(j.fd_depth());
    for (const auto& [idx, c] : j.coefficients()) {
        out.set_coefficient(idx, Coefficient{[model, g, v = c.value](const Point& p) {
            return v(p) / detail::holonomy_minus_one_inverse_factor(*model, g, p);
        }});
    }
    return out;
}

/// Evaluates beta(p) for a closed form a at a point with nontrivial holonomy.
/// Closedness of a is checked at p to eq_tol; holonomy-trivial points are
/// rejected since the construction only applies where Q != 1.
inline FormValue exactness_potential(const VectorFieldId& X, const PolarisedForm& a, const Point& p,
                                     const NumericsConfig& cfg) {
    const auto& model = a.model();
    const double closed_residual = covariant_derivative(a, cfg).evaluate(p).max_abs();
    if (closed_residual > cfg.eq_tol)
        throw error("exactness_potential: input form is not closed at the sample point (residual " +
                    std::to_string(closed_residual) + ")");
    const Complex qfac = detail::holonomy_minus_one_inverse_factor(*model, X.index, p);
    if (std::abs(qfac) <= 1e-8)
        throw holonomy_trivial_error("exactness_potential: holonomy-trivial point (|Q^-1 - 1| <= 1e-8)");
    return exactness_potential_form(X, a, cfg).evaluate(p);
}

/// Integral of exp(-2 pi i t h) over t in [0,1]; equals 1 at h = 0 and
/// (Q^-1 - 1)/(-2 pi i h) elsewhere. Small arguments go through the series.
inline Complex division_denominator(double h) {
    const double w = -kTwoPi * h;
    if (std::abs(w) < 1e-4) {
        // sum_{k>=0} (i w)^k / (k+1)!
        Complex term(1.0, 0.0), sum(1.0, 0.0);
        for (int k = 1; k <= 6; ++k) {
            term *= Complex(0.0, w) / static_cast<double>(k + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(Complex(0.0, w)) - Complex(1.0, 0.0)) / Complex(0.0, w);
}

namespace detail {

struct DivisionChart {
    std::function<double(const Point&)> h;              // Q = exp(2 pi i h)
    std::function<std::vector<double>(const Point&)> grad_h;
    std::vector<std::vector<double>> sphere_directions;  // antipodal set, |h| bounded below on it
};

inline DivisionChart division_chart(const Model& model, DiskConvention conv) {
    DivisionChart c;
    if (model.spec().kind == ModelKind::Disk) {
        const double s = conv == DiskConvention::PaperPrinted ? 1.0 : 0.5;
        c.h = [s](const Point& p) { return s * (p[0] * p[0] + p[1] * p[1]); };
        c.grad_h = [s](const Point& p) { return std::vector<double>{2.0 * s * p[0], 2.0 * s * p[1]}; };
        const double r = 1.0 / std::sqrt(2.0);
        c.sphere_directions = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {r, r}, {-r, -r}, {r, -r}, {-r, r}};
    } else if (model.spec().kind == ModelKind::FocusFocus) {
        c.h = [](const Point& p) { return p[0] * p[3] - p[1] * p[2]; };
        c.grad_h = [](const Point& p) { return std::vector<double>{p[3], -p[2], -p[1], p[0]}; };
        const double r = 1.0 / std::sqrt(2.0);
        // Directions chosen so |h| = rho^2/2 exactly on the sampling sphere.
        c.sphere_directions = {{r, 0, 0, r},  {-r, 0, 0, -r}, {0, r, -r, 0}, {0, -r, r, 0},
                               {r, 0, 0, -r}, {-r, 0, 0, r},  {0, r, r, 0},  {0, -r, -r, 0}};
    } else {
        throw invalid_spec_error("holonomy_division: implemented on the disk and focus-focus charts only");
    }
    return c;
}

}  // namespace detail

/// Divides f by Q^{-1}-1 on the disk or focus-focus chart, assuming f
/// vanishes on {Q = 1}. Away from that set this is the gradient-flow closed
/// form (f - lim f o phi_t)/(Q^{-1}-1); on and near the set the quotient is
/// recovered by symmetric sampling with Richardson extrapolation. Inputs
/// that fail to vanish on {Q = 1} surface as a division-obstruction error.
inline Complex holonomy_division(const Model& model, const std::function<Complex(const Point&)>& f,
                                 const Point& p, const NumericsConfig& cfg,
                                 DiskConvention conv = DiskConvention::TransportOracle) {
    cfg.validate();
    model.check_point(p);
    const auto chart = detail::division_chart(model, conv);

    auto qfac = [&chart](const Point& q) {  // Q^{-1} - 1
        return std::exp(Complex(0.0, -kTwoPi * chart.h(q))) - Complex(1.0, 0.0);
    };

    // Gradient-flow limit of f: integrate -h grad(h) until |h| < 1e-10. The
    // limit lies on {Q = 1}, so f there must be ~0; anything larger means f
    // fails the vanishing hypothesis.
    auto flow_limit = [&](const Point& start) {
        std::vector<double> y = start;
        auto rhs = [&chart](double, const std::vector<double>& q) {
            const double h = chart.h(q);
            std::vector<double> z = chart.grad_h(q);
            for (double& c : z) c *= -h;
            return z;
        };
        double t = 0.0, span = 1.0;
        int iter = 0;
        while (std::abs(chart.h(y)) > 1e-10 && iter < 400) {
            y = integrate_rk4(rhs, y, t, t + span, cfg.ode_tol, 100000).state;
            t += span;
            span *= 2.0;  // algebraic decay near fixed points needs huge horizons
            ++iter;
        }
        return Point(y.begin(), y.end());
    };
    const Complex limit_value = f(flow_limit(p));
    if (std::abs(limit_value) > 100.0 * cfg.eq_tol)
        throw division_obstruction_error(
            "holonomy_division: f does not vanish at the gradient-flow limit on {Q = 1} (|f| = " +
            std::to_string(std::abs(limit_value)) + ")");

    auto quotient = [&](const Point& q) { return (f(q) - limit_value) / qfac(q); };

    const Complex D = qfac(p);
    if (std::abs(D) >= 1e-3) return quotient(p);

    std::vector<double> Z = chart.grad_h(p);
    double zn = 0.0;
    for (double c : Z) zn += c * c;
    zn = std::sqrt(zn);

    auto richardson3 = [](Complex a0, Complex a1, Complex a2) {
        // even-series extrapolation from A(s), A(s/2), A(s/4)
        const Complex r1 = (4.0 * a1 - a0) / 3.0;
        const Complex r2 = (4.0 * a2 - a1) / 3.0;
        return (16.0 * r2 - r1) / 15.0;
    };

    if (zn >= 0.025) {
        // Near a regular sheet of {Q = 1}: symmetric step along grad(h). The
        // base step keeps |h - m| >= 1e-3 at the finest level, well clear of
        // the cancellation zone.
        const double s0 = std::min(4e-3 / zn, 0.2);
        std::vector<Complex> avg(3);
        for (int level = 0; level < 3; ++level) {
            const double s = s0 / std::pow(2.0, level);
            Point qp = p, qm = p;
            for (size_t i = 0; i < p.size(); ++i) {
                qp[i] += s * Z[i] / zn;
                qm[i] -= s * Z[i] / zn;
            }
            const Complex vp = quotient(qp), vm = quotient(qm);
            if (std::abs(vp - vm) > 5.0 * (1.0 + 0.5 * std::abs(vp + vm)))
                throw division_obstruction_error(
                    "holonomy_division: quotient blows up across {Q = 1}; f does not vanish there");
            avg[level] = 0.5 * (vp + vm);
        }
        return richardson3(avg[0], avg[1], avg[2]);
    }

    // Near the fixed-point locus: antipodal sphere averages at shrinking radii.
    std::vector<Complex> avg(3);
    for (int level = 0; level < 3; ++level) {
        const double rho = 0.4 / std::pow(2.0, level);
        Complex acc{};
        for (const auto& dir : chart.sphere_directions) {
            Point q = p;
            for (size_t i = 0; i < q.size(); ++i) q[i] += rho * dir[i];
            acc += quotient(q);
        }
        avg[level] = acc / static_cast<double>(chart.sphere_directions.size());
        if (level > 0 && std::abs(avg[level] - avg[level - 1]) > 0.5 * (1.0 + std::abs(avg[level])))
            throw division_obstruction_error(
                "holonomy_division: sphere averages diverge near the fixed point; f does not vanish on {Q = 1}");
    }
    return richardson3(avg[0], avg[1], avg[2]);
}

/// Max variation of Q along the polarisation flows through p; Q is constant
/// along P, so this is a pure consistency residual.
inline double holonomy_constancy_check(const Model& model, const VectorFieldId& X, const Point& p,
                                       const NumericsConfig& cfg,
                                       DiskConvention conv = DiskConvention::TransportOracle) {
    cfg.validate();
    const Complex q0 = holonomy_formula(model, {p, X}, conv).value;
    double res = 0.0;
    for (int g = 1; g <= model.rank(); ++g) {
        for (double delta : {1e-3, 0.1, 0.7}) {
            const Point moved = model.flow_raw(g, p, delta);
            const Complex q1 = holonomy_formula(model, {moved, X}, conv).value;
            res = std::max(res, std::abs(q1 - q0));
        }
    }
    return res;
}

/// Closed form of the focus-focus bound integral over one period:
/// integral of exp(-i t lambda) cos t dt = i lambda (e^{-2 pi i lambda}-1)/(lambda^2-1),
/// extended continuously through lambda = +-1.
inline Complex focusfocus_cos_integral_closed_form(double lambda) {
    if (std::abs(lambda * lambda - 1.0) < 1e-8) return Complex(kPi, 0.0);
    return Complex(0.0, lambda) * (std::exp(Complex(0.0, -kTwoPi * lambda)) - Complex(1.0, 0.0)) /
           (lambda * lambda - 1.0);
}

}  // namespace gq
