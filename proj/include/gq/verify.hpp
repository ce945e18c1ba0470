// Verification suites: every operator identity, holonomy agreement, homotopy
// residual, division roundtrip, and Bohr-Sommerfeld characterisation, run
// over seeded samples and reported as a machine-readable residual table.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "gq/bohr_sommerfeld.hpp"
#include "gq/circle_action.hpp"
#include "gq/forms.hpp"
#include "gq/io.hpp"
#include "gq/model.hpp"
#include "gq/quantisation.hpp"

namespace gq {

struct VerifyCase {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::string suite;
    uint64_t seed = 0;
    int samples = 0;
    std::vector<VerifyCase> cases;
    bool all_pass = true;
};

namespace sampling {

/// Uniform chart point in the bound box (angles over the full circle, other
/// coordinates over [-halfwidth, halfwidth]), resampled away from singular
/// points of the polarisation.
inline Point random_chart_point(const Model& model, Rng& rng, double halfwidth = 2.0,
                                double singular_ball = 1e-3) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Point p(model.dim());
        for (int i = 0; i < model.dim(); ++i) {
            if (model.periodic()[i]) {
                p[i] = rng.uniform(0.0, kTwoPi);
            } else {
                const auto& b = model.bounds()[i];
                const double lo = std::max(b.lo, -halfwidth), hi = std::min(b.hi, halfwidth);
                p[i] = rng.uniform(lo, hi);
            }
        }
        bool ok = true;
        using FK = detail::FactorKind;
        for (const auto& f : model.factors()) {
            if (f.kind == FK::EllipticPair) {
                ok = ok && std::hypot(p[f.x1], p[f.y1]) >= singular_ball;
            } else if (f.kind == FK::FocusFocusBlock) {
                const double n2 = p[f.x1] * p[f.x1] + p[f.x2] * p[f.x2] + p[f.y1] * p[f.y1] +
                                  p[f.y2] * p[f.y2];
                ok = ok && std::sqrt(n2) >= singular_ball;
            }
        }
        if (ok) return p;
    }
    throw error("random_chart_point: could not sample away from singular points");
}

/// Random bounded trigonometric coefficient; integer frequencies on angle
/// coordinates keep it single-valued, and analytic directional derivatives
/// come along for the Analytic mode.
inline Coefficient random_trig_coefficient(const ModelHandle& model, Rng& rng,
                                           double max_real_freq = 1.0, int max_angle_freq = 2,
                                           int terms = 2) {
    struct Term {
        Complex amp;
        std::vector<double> freq;
        double phase;
    };
    auto data = std::make_shared<std::vector<Term>>();
    for (int t = 0; t < terms; ++t) {
        Term term;
        term.amp = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        term.phase = rng.uniform(0.0, kTwoPi);
        term.freq.resize(model->dim());
        for (int i = 0; i < model->dim(); ++i)
            term.freq[i] = model->periodic()[i]
                               ? static_cast<double>(rng.uniform_int(-max_angle_freq, max_angle_freq))
                               : rng.uniform(-max_real_freq, max_real_freq);
        data->push_back(std::move(term));
    }
    Coefficient c;
    c.value = [data](const Point& p) {
        Complex z{};
        for (const auto& t : *data) {
            double arg = t.phase;
            for (size_t i = 0; i < p.size(); ++i) arg += t.freq[i] * p[i];
            z += t.amp * std::cos(arg);
        }
        return z;
    };
    c.directional = [data, model](const Point& p, int g) {
        const auto X = model->generator(g, p);
        Complex z{};
        for (const auto& t : *data) {
            double arg = t.phase, rate = 0.0;
            for (size_t i = 0; i < p.size(); ++i) {
                arg += t.freq[i] * p[i];
                rate += t.freq[i] * X[i];
            }
            z += -t.amp * std::sin(arg) * rate;
        }
        return z;
    };
    return c;
}

inline PolarisedForm random_form(const ModelHandle& model, int degree, Rng& rng,
                                 DerivativeMode mode = DerivativeMode::FiniteDifference,
                                 double max_real_freq = 1.0) {
    PolarisedForm f(model, degree, mode);
    for (const auto& idx : detail::increasing_multi_indices(model->rank(), degree))
        f.set_coefficient(idx, random_trig_coefficient(model, rng, max_real_freq));
    return f;
}

/// Distance between chart points, with angle coordinates compared modulo 2*pi.
inline double point_distance(const Model& model, const Point& a, const Point& b) {
    double m = 0.0;
    for (int i = 0; i < model.dim(); ++i) {
        double d = std::abs(a[i] - b[i]);
        if (model.periodic()[i]) {
            d = std::fmod(d, kTwoPi);
            d = std::min(d, kTwoPi - d);
        }
        m = std::max(m, d);
    }
    return m;
}

}  // namespace sampling

namespace detail {

struct CaseSink {
    std::vector<VerifyCase>& out;
    void add(const std::string& name, double residual, double tolerance) {
        out.push_back({name, residual, tolerance, residual <= tolerance});
    }
    void add_flag(const std::string& name, bool ok) {
        out.push_back({name, ok ? 0.0 : 1.0, 0.5, ok});
    }
};

inline std::vector<ModelHandle> operator_models() {
    return {make_model(ModelSpec::cylinder()),        make_model(ModelSpec::disk()),
            make_model(ModelSpec::linear(2)),         make_model(ModelSpec::liouville(2, 1)),
            make_model(ModelSpec::elliptic(2, 1)),    make_model(ModelSpec::focus_focus())};
}

inline void suite_operators(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;
    const int pts = std::max(8, cfg.samples);

    for (const auto& model : operator_models()) {
        Rng rng(cfg.seed ^ std::hash<std::string>{}(model->name()));
        const std::string tag = model->name() + ": ";
        const int n = model->rank();

        // gauge consistency dTheta = omega by antisymmetrised coordinate differences
        {
            double res = 0.0;
            const double h = 1e-5;
            for (int s = 0; s < std::min(pts, 40); ++s) {
                const Point p = sampling::random_chart_point(*model, rng);
                for (int i = 0; i < model->dim(); ++i)
                    for (int j = i + 1; j < model->dim(); ++j) {
                        std::vector<double> ei(model->dim(), 0.0), ej(model->dim(), 0.0);
                        ei[i] = 1.0;
                        ej[j] = 1.0;
                        Point pi1 = p, pi0 = p, pj1 = p, pj0 = p;
                        pi1[i] += h;
                        pi0[i] -= h;
                        pj1[j] += h;
                        pj0[j] -= h;
                        const double d_i_theta_j = (model->theta(pi1, ej) - model->theta(pi0, ej)) / (2 * h);
                        const double d_j_theta_i = (model->theta(pj1, ei) - model->theta(pj0, ei)) / (2 * h);
                        res = std::max(res, std::abs(d_i_theta_j - d_j_theta_i - model->omega(p, ei, ej)));
                    }
            }
            sink.add(tag + "gauge dTheta = omega", res, 1e-6);
        }

        // flow group law and periodicity
        {
            double res_group = 0.0, res_period = 0.0;
            for (int s = 0; s < std::min(pts, 50); ++s) {
                const Point p = sampling::random_chart_point(*model, rng);
                for (int g = 1; g <= n; ++g) {
                    const double t = rng.uniform(-3.0, 3.0), u = rng.uniform(-3.0, 3.0);
                    const Point a = model->flow(g, model->flow(g, p, t), u);
                    const Point b = model->flow(g, p, t + u);
                    res_group = std::max(res_group, sampling::point_distance(*model, a, b));
                    if (model->is_circle_generator(g)) {
                        const PeriodInfo per = model->period(g, p);
                        if (!per.fixed_point)
                            res_period = std::max(
                                res_period,
                                sampling::point_distance(*model, model->flow(g, p, per.value), p));
                    }
                }
            }
            sink.add(tag + "flow group law", res_group, 1e-9);
            sink.add(tag + "flow periodicity", res_period, 1e-9);
        }

        // pairwise commutation of generators via finite-difference Jacobians
        {
            double res = 0.0;
            const double h = 1e-4;
            for (int s = 0; s < std::min(pts, 25); ++s) {
                const Point p = sampling::random_chart_point(*model, rng);
                for (int a = 1; a <= n; ++a)
                    for (int b = a + 1; b <= n; ++b) {
                        const auto Xa = model->generator(a, p), Xb = model->generator(b, p);
                        for (int i = 0; i < model->dim(); ++i) {
                            double bracket = 0.0;
                            for (int j = 0; j < model->dim(); ++j) {
                                Point pp = p, pm = p;
                                pp[j] += h;
                                pm[j] -= h;
                                const double dXb = (model->generator(b, pp)[i] - model->generator(b, pm)[i]) / (2 * h);
                                const double dXa = (model->generator(a, pp)[i] - model->generator(a, pm)[i]) / (2 * h);
                                bracket += dXb * Xa[j] - dXa * Xb[j];
                            }
                            res = std::max(res, std::abs(bracket));
                        }
                    }
            }
            sink.add(tag + "generators commute", res, 1e-5);
        }

        // operator identities on random forms
        {
            double res_dd = 0.0, res_pb_d = 0.0, res_pb_group = 0.0, res_lie = 0.0, res_lie_d = 0.0;
            double res_wedge_leibniz = 0.0, res_d_leibniz = 0.0, res_ii = 0.0, res_mode = 0.0;
            for (int s = 0; s < pts; ++s) {
                if (s % 25 == 0) rng.eng.discard(1);
                Rng local(rng.eng());
                const Point p = sampling::random_chart_point(*model, local);
                const int g = local.uniform_int(1, n);
                const VectorFieldId X = model->generator_id(g);
                const PolarisedForm a0 = sampling::random_form(model, 0, local);
                const PolarisedForm a1 = sampling::random_form(model, 1, local);

                res_dd = std::max(res_dd, covariant_derivative(covariant_derivative(a0, nc), nc)
                                              .evaluate(p)
                                              .max_abs());
                res_dd = std::max(res_dd, covariant_derivative(covariant_derivative(a1, nc), nc)
                                              .evaluate(p)
                                              .max_abs());

                const double t = local.uniform(-2.0, 2.0);
                res_pb_d = std::max(res_pb_d,
                                    max_difference(covariant_derivative(pullback(X, t, a1, nc), nc).evaluate(p),
                                                   pullback(X, t, covariant_derivative(a1, nc), nc).evaluate(p)));
                const double u = local.uniform(-2.0, 2.0);
                res_pb_group = std::max(
                    res_pb_group,
                    max_difference(pullback(X, t, pullback(X, u, a1, nc), nc).evaluate(p),
                                   pullback(X, t + u, a1, nc).evaluate(p)));

                // Cartan Lie derivative against the pullback's t-derivative
                {
                    const double d = nc.fd_step;
                    FormValue plus = pullback(X, d, a1, nc).evaluate(p);
                    FormValue minus = pullback(X, -d, a1, nc).evaluate(p);
                    FormValue fd;
                    fd.degree = plus.degree;
                    for (const auto& [idx, z] : plus.coeffs) fd.coeffs[idx] = (z - minus.coeffs[idx]) / (2 * d);
                    res_lie = std::max(res_lie,
                                       max_difference(lie_derivative(X, a1, nc).evaluate(p), fd));
                }
                res_lie_d = std::max(res_lie_d,
                                     max_difference(lie_derivative(X, covariant_derivative(a0, nc), nc).evaluate(p),
                                                    covariant_derivative(lie_derivative(X, a0, nc), nc).evaluate(p)));

                // Leibniz rules
                if (n >= 2) {
                    const PolarisedForm b1 = sampling::random_form(model, 1, local);
                    const PolarisedForm ab = wedge(a1, b1);
                    res_wedge_leibniz = std::max(
                        res_wedge_leibniz,
                        max_difference(interior_product(X, ab).evaluate(p),
                                       (wedge(interior_product(X, a1), b1) +
                                        scale(wedge(a1, interior_product(X, b1)), Complex(-1.0, 0.0)))
                                           .evaluate(p)));
                    res_d_leibniz = std::max(
                        res_d_leibniz,
                        max_difference(covariant_derivative(ab, nc).evaluate(p),
                                       (wedge(polarised_exterior_derivative(a1, nc), b1) +
                                        scale(wedge(a1, covariant_derivative(b1, nc)), Complex(-1.0, 0.0)))
                                           .evaluate(p)));
                    const PolarisedForm two = sampling::random_form(model, 2, local);
                    res_ii = std::max(
                        res_ii, interior_product(X, interior_product(X, two)).evaluate(p).max_abs());
                }

                // analytic partials against finite differences
                {
                    PolarisedForm analytic(model, 1, DerivativeMode::Analytic);
                    PolarisedForm finite(model, 1, DerivativeMode::FiniteDifference);
                    const Coefficient c = sampling::random_trig_coefficient(model, local);
                    MultiIndex idx{1};
                    analytic.set_coefficient(idx, c);
                    finite.set_coefficient(idx, c);
                    res_mode = std::max(res_mode,
                                        max_difference(covariant_derivative(analytic, nc).evaluate(p),
                                                       covariant_derivative(finite, nc).evaluate(p)));
                }
            }
            sink.add(tag + "d o d = 0", res_dd, nc.eq_tol);
            sink.add(tag + "pullback commutes with d", res_pb_d, nc.eq_tol);
            sink.add(tag + "pullback group law", res_pb_group, nc.eq_tol);
            sink.add(tag + "Lie derivative = pullback t-derivative", res_lie,
                     std::max(nc.eq_tol, 10.0 * nc.fd_step * nc.fd_step));
            sink.add(tag + "Lie derivative commutes with d", res_lie_d, nc.eq_tol);
            if (n >= 2) {
                sink.add(tag + "interior product Leibniz", res_wedge_leibniz, 1e-12);
                sink.add(tag + "d Leibniz", res_d_leibniz, 1e-8);
                sink.add(tag + "i_X o i_X = 0", res_ii, 1e-15);
            }
            sink.add(tag + "analytic partials match finite differences", res_mode, 1e-7);
        }
    }

    // closed-form flat sections satisfy the flat equation
    for (const auto& spec : {ModelSpec::cylinder(), ModelSpec::linear(2)}) {
        const auto model = make_model(spec);
        Rng rng(cfg.seed + 7);
        auto profile = [](const std::vector<double>& x) {
            double s = 1.0;
            for (double v : x) s += 0.25 * std::sin(v);
            return Complex(s, 0.5 * std::cos(x[0]));
        };
        const auto section = flat_section_closed_form(*model, profile);
        PolarisedForm s0 = PolarisedForm::section(model, Coefficient{*section});
        double res = 0.0;
        for (int s = 0; s < 30; ++s) {
            const Point p = sampling::random_chart_point(*model, rng);
            res = std::max(res, covariant_derivative(s0, cfg.numerics).evaluate(p).max_abs());
        }
        sink.add(model->name() + ": closed-form flat section satisfies the flat equation", res, 1e-6);
    }
}

inline void suite_holonomy(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;
    const double agree_tol = std::max(1e-8, 10.0 * nc.ode_tol);

    const std::vector<ModelHandle> models = {make_model(ModelSpec::cylinder()), make_model(ModelSpec::disk()),
                                             make_model(ModelSpec::focus_focus()),
                                             make_model(ModelSpec::elliptic(2, 1))};
    for (const auto& model : models) {
        Rng rng(cfg.seed ^ (0xabcd + std::hash<std::string>{}(model->name())));
        double res_agree = 0.0, res_unit = 0.0, res_const = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const Point p = sampling::random_chart_point(*model, rng, 2.0, 1e-2);
            for (int g = 1; g <= model->rank(); ++g) {
                if (!model->is_circle_generator(g)) continue;
                const OrbitSample orbit{p, model->generator_id(g)};
                const Holonomy hf = holonomy_formula(*model, orbit);
                const Holonomy ht = holonomy_transport(*model, orbit, nc);
                res_agree = std::max(res_agree, std::abs(hf.value - ht.value));
                res_unit = std::max(res_unit, std::abs(std::abs(ht.value) - 1.0));
                if (s < 20)
                    res_const = std::max(res_const,
                                         holonomy_constancy_check(*model, orbit.generator, p, nc));
            }
        }
        sink.add(model->name() + ": holonomy formula agrees with transport", res_agree, agree_tol);
        sink.add(model->name() + ": |Q| = 1", res_unit, 1e-9);
        sink.add(model->name() + ": Q constant along the polarisation", res_const, 1e-8);
    }

    // pinned closed-form values
    {
        const auto cyl = make_model(ModelSpec::cylinder());
        const auto ff = make_model(ModelSpec::focus_focus());
        const auto disk = make_model(ModelSpec::disk());
        double res = 0.0;
        auto val = [&](const Model& m, Point p, int g, DiskConvention c = DiskConvention::TransportOracle) {
            return holonomy_formula(m, {std::move(p), m.generator_id(g)}, c).value;
        };
        res = std::max(res, std::abs(val(*cyl, {0.5, 0.3}, 1) - Complex(-1.0, 0.0)));
        res = std::max(res, std::abs(val(*cyl, {0.25, 1.0}, 1) - Complex(0.0, 1.0)));
        res = std::max(res, std::abs(val(*cyl, {0.0, 1.0}, 1) - Complex(1.0, 0.0)));
        res = std::max(res, std::abs(val(*ff, {1, 0, 0, 1}, 2) - Complex(1.0, 0.0)));
        res = std::max(res, std::abs(val(*ff, {1, 0, 0, 0.5}, 2) - Complex(-1.0, 0.0)));
        res = std::max(res, std::abs(val(*disk, {1, 0}, 1) - Complex(-1.0, 0.0)));
        res = std::max(res,
                       std::abs(val(*disk, {1, 0}, 1, DiskConvention::PaperPrinted) - Complex(1.0, 0.0)));
        sink.add("pinned holonomy values (cylinder, focus-focus, disk both conventions)", res, 1e-12);

        const Holonomy fixed = holonomy_formula(*disk, {{0.0, 0.0}, disk->generator_id(1)});
        sink.add_flag("fixed points report Q = 1, period 0",
                      fixed.fixed_point && fixed.period == 0.0 &&
                          std::abs(fixed.value - Complex(1.0, 0.0)) == 0.0);
    }

    // disk convention audit against the transport oracle
    {
        const auto disk = make_model(ModelSpec::disk());
        Rng rng(cfg.seed + 11);
        double res_transport = 0.0, res_paper = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const Point p = sampling::random_chart_point(*disk, rng, 2.0, 1e-2);
            const double F = p[0] * p[0] + p[1] * p[1];
            const Holonomy ht = holonomy_transport(*disk, {p, disk->generator_id(1)}, nc);
            res_transport = std::max(res_transport, std::abs(ht.value - std::exp(Complex(0.0, kPi * F))));
            const Holonomy hp = holonomy_formula(*disk, {p, disk->generator_id(1)},
                                                 DiskConvention::PaperPrinted);
            res_paper = std::max(res_paper, std::abs(hp.value - std::exp(Complex(0.0, kTwoPi * F))));
        }
        sink.add("disk transport oracle equals exp(i*pi*F)", res_transport, 1e-8);
        sink.add("disk printed convention equals exp(i*2*pi*F)", res_paper, 1e-8);
    }

    // d commutes with multiplication by [Q^{-1} - 1] (holonomy constant along P)
    for (const auto& model : {make_model(ModelSpec::cylinder()), make_model(ModelSpec::focus_focus())}) {
        Rng rng(cfg.seed + 13);
        double res = 0.0;
        const int g = model->rank();  // the circle generator in both charts
        auto qfac = [model, g](const Point& p) {
            return detail::holonomy_minus_one_inverse_factor(*model, g, p);
        };
        for (int s = 0; s < 20; ++s) {
            const Point p = sampling::random_chart_point(*model, rng, 1.5, 5e-2);
            const PolarisedForm a = sampling::random_form(model, model->rank() >= 2 ? 1 : 0, rng);
            res = std::max(res, max_difference(covariant_derivative(scale(a, qfac), cfg.numerics).evaluate(p),
                                               scale(covariant_derivative(a, cfg.numerics), qfac).evaluate(p)));
        }
        sink.add(model->name() + ": d commutes with [Q^{-1}-1] multiplication", res, 2e-5);
    }
}

inline void suite_homotopy(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;

    for (const auto& model : {make_model(ModelSpec::cylinder()), make_model(ModelSpec::disk()),
                              make_model(ModelSpec::focus_focus())}) {
        Rng rng(cfg.seed ^ (0x517 + std::hash<std::string>{}(model->name())));
        const int circle = model->rank();  // last generator is the circle one here
        const VectorFieldId X = model->generator_id(circle);

        double res1 = 0.0;
        for (int s = 0; s < cfg.samples; ++s) {
            const PolarisedForm a = sampling::random_form(model, 1, rng);
            const Point p = sampling::random_chart_point(*model, rng);
            res1 = std::max(res1, homotopy_identity_residual(X, a, p, nc));
        }
        sink.add(model->name() + ": homotopy identity, degree 1", res1, 1e-6);

        double res0 = 0.0;
        for (int s = 0; s < std::max(4, cfg.samples / 4); ++s) {
            const PolarisedForm a = sampling::random_form(model, 0, rng);
            const Point p = sampling::random_chart_point(*model, rng);
            res0 = std::max(res0, homotopy_identity_residual(X, a, p, nc));
        }
        sink.add(model->name() + ": homotopy identity, degree 0", res0, 1e-6);

        if (model->rank() >= 2) {
            double res_top = 0.0;
            for (int s = 0; s < std::max(4, cfg.samples / 4); ++s) {
                const PolarisedForm a = sampling::random_form(model, model->rank(), rng);
                const Point p = sampling::random_chart_point(*model, rng);
                res_top = std::max(res_top, homotopy_identity_residual(X, a, p, nc));
            }
            sink.add(model->name() + ": homotopy identity, top degree", res_top, 1e-6);
        }

        // degree bookkeeping
        {
            const PolarisedForm a = sampling::random_form(model, 1, rng);
            const PolarisedForm j = homotopy_form(X, a, nc);
            sink.add_flag(model->name() + ": J_X drops the degree by one", j.degree() == 0);
        }
    }

    // cylinder closed forms: J(dy (x) s) = (e^{-2 pi i x} - 1)/(-i x), checked
    // against a high-node quadrature as well
    {
        const auto cyl = make_model(ModelSpec::cylinder());
        Rng rng(cfg.seed + 17);
        PolarisedForm dy(cyl, 1);
        dy.set_coefficient({1}, Coefficient{[](const Point&) { return Complex(1.0, 0.0); }});
        double res_closed = 0.0, res_high = 0.0;
        NumericsConfig high = nc;
        high.quadrature_steps = 1 << 14;
        for (int s = 0; s < 20; ++s) {
            Point p{rng.uniform(-2.0, 2.0), rng.uniform(0.0, kTwoPi)};
            if (std::abs(p[0]) < 0.05) p[0] += 0.5;
            const Complex expect =
                (std::exp(Complex(0.0, -kTwoPi * p[0])) - Complex(1.0, 0.0)) / Complex(0.0, -p[0]);
            const Complex got = homotopy_operator(cyl->generator_id(1), dy, p, nc).coeffs.at({});
            const Complex got_high = homotopy_operator(cyl->generator_id(1), dy, p, high).coeffs.at({});
            res_closed = std::max(res_closed, std::abs(got - expect));
            res_high = std::max(res_high, std::abs(got_high - expect));
        }
        sink.add("cylinder: J(dy (x) s) matches the closed-form phase integral", res_closed, 1e-8);
        sink.add("cylinder: closed form confirmed at 2^14 quadrature nodes", res_high, 1e-10);
    }

    // exactness construction on the cylinder at non-Bohr-Sommerfeld heights
    {
        const auto cyl = make_model(ModelSpec::cylinder());
        Rng rng(cfg.seed + 19);
        const VectorFieldId X = cyl->generator_id(1);
        double res = 0.0;
        for (int s = 0; s < 50; ++s) {
            const PolarisedForm a = sampling::random_form(cyl, 1, rng);  // top degree: closed
            Point p = sampling::random_chart_point(*cyl, rng);
            const double frac = p[0] - std::floor(p[0]);
            if (frac < 0.15) p[0] += 0.2;
            if (frac > 0.85) p[0] -= 0.2;
            const PolarisedForm beta = exactness_potential_form(X, a, nc);
            res = std::max(res, max_difference(covariant_derivative(beta, nc).evaluate(p), a.evaluate(p)));
        }
        sink.add("cylinder: d(J_X a / (Q^{-1}-1)) reproduces closed a off the BS set", res, 1e-5);

        bool threw = false;
        try {
            PolarisedForm a = sampling::random_form(cyl, 1, rng);
            exactness_potential(X, a, Point{1.0, 0.3}, nc);
        } catch (const holonomy_trivial_error&) {
            threw = true;
        }
        sink.add_flag("cylinder: exactness construction rejects BS points", threw);

        // exact input: beta differs from sigma by a closed form, so d beta = d sigma
        double res_exact = 0.0;
        for (int s = 0; s < 10; ++s) {
            const PolarisedForm sigma = sampling::random_form(cyl, 0, rng);
            const PolarisedForm a = covariant_derivative(sigma, nc);
            Point p = sampling::random_chart_point(*cyl, rng);
            p[0] = std::floor(p[0]) + 0.5;
            const PolarisedForm beta = exactness_potential_form(X, a, nc);
            res_exact = std::max(res_exact,
                                 max_difference(covariant_derivative(beta, nc).evaluate(p), a.evaluate(p)));
        }
        sink.add("cylinder: exact inputs reproduce d sigma", res_exact, 1e-5);
    }

    // Kunneth projection on the cylinder x cylinder product
    {
        const auto prod = make_model(ModelSpec::product(ModelSpec::cylinder(), ModelSpec::cylinder()));
        const auto right = prod->right();
        const VectorFieldId XL = prod->generator_id(1);
        Rng rng(cfg.seed + 23);

        // image of a closed form is closed
        double res_closed = 0.0;
        for (int s = 0; s < 5; ++s) {
            const PolarisedForm a = sampling::random_form(prod, 2, rng);  // top degree: closed
            const PolarisedForm img = kunneth_project_form(prod, XL, a, nc);
            const Point pr = sampling::random_chart_point(*right, rng);
            res_closed = std::max(res_closed, covariant_derivative(img, nc).evaluate(pr).max_abs());
        }
        sink.add("kunneth: image of a closed form is closed on the right factor", res_closed, 1e-6);

        // exact input -> exact output, witnessed by the right-factor potential
        double res_exact = 0.0;
        for (int s = 0; s < 5; ++s) {
            const PolarisedForm sigma = sampling::random_form(prod, 1, rng);
            const PolarisedForm a = covariant_derivative(sigma, nc);
            const PolarisedForm img = kunneth_project_form(prod, XL, a, nc);
            Point pr = sampling::random_chart_point(*right, rng);
            pr[0] = std::floor(pr[0]) + 0.5;  // non-BS on the right factor
            const PolarisedForm pot = exactness_potential_form(right->generator_id(1), img, nc);
            res_exact = std::max(res_exact,
                                 max_difference(covariant_derivative(pot, nc).evaluate(pr), img.evaluate(pr)));
        }
        sink.add("kunneth: exact inputs map to exact right-factor forms", res_exact, 1e-5);

        // forms with i_X a = 0 and left-independent coefficients die
        {
            PolarisedForm a(prod, 1);
            a.set_coefficient({2}, Coefficient{[](const Point& p) {
                return Complex(std::sin(p[2]), std::cos(p[3]));
            }});
            const Point pr = sampling::random_chart_point(*right, rng);
            sink.add("kunneth: left-independent forms with i_X a = 0 map to zero",
                     kunneth_project(prod, XL, a, pr, nc).max_abs(), 1e-9);
        }

        // dy_L wedge (right form) -> nonzero closed right form; 2-form in, 1-form out
        {
            PolarisedForm a(prod, 2);
            a.set_coefficient({1, 2}, Coefficient{[](const Point&) { return Complex(1.0, 0.0); }});
            const Point pr{0.4, 1.3};
            const FormValue v = kunneth_project(prod, XL, a, pr, nc);
            sink.add_flag("kunneth: dy_L ^ dy_R maps to a nonzero right 1-form",
                          v.degree == 1 && v.max_abs() > 1.0);
        }
    }

    // a flat restriction over the BS leaf x = 0 and the vanishing forced off it
    {
        const auto cyl = make_model(ModelSpec::cylinder());
        PolarisedForm one = PolarisedForm::section(cyl, Coefficient{[](const Point&) {
            return Complex(1.0, 0.0);
        }});
        const FormValue on_leaf = covariant_derivative(one, nc).evaluate({0.0, 1.2});
        sink.add("cylinder: the gauge section is flat along the BS leaf x = 0", on_leaf.max_abs(), 1e-9);
        const FormValue off_leaf = covariant_derivative(one, nc).evaluate({0.5, 1.2});
        sink.add_flag("cylinder: the gauge section is not flat off the BS set",
                      off_leaf.max_abs() > 0.4);
    }
}

inline void suite_division(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;
    const auto disk = make_model(ModelSpec::disk());

    auto qfac_disk = [](const Point& p) {
        const double h = 0.5 * (p[0] * p[0] + p[1] * p[1]);
        return std::exp(Complex(0.0, -kTwoPi * h)) - Complex(1.0, 0.0);
    };

    // roundtrip over ten seeded smooth factors, on and off {Q = 1}
    {
        Rng rng(cfg.seed + 29);
        const double r2 = std::sqrt(2.0);
        std::vector<Point> pts = {{0.0, 0.0}, {r2, 0.0}, {0.0, r2}, {1.0, 1.0}, {2.0, 0.0}, {-r2, 0.0}};
        for (int s = 0; s < 8; ++s) pts.push_back(sampling::random_chart_point(*disk, rng, 2.0, 0.0));
        double res = 0.0;
        for (int fam = 0; fam < 10; ++fam) {
            const Coefficient g0 = sampling::random_trig_coefficient(disk, rng, 0.7);
            auto f = [g0, qfac_disk](const Point& p) { return qfac_disk(p) * g0.value(p); };
            for (const auto& p : pts)
                res = std::max(res, std::abs(holonomy_division(*disk, f, p, nc) - g0.value(p)));
        }
        sink.add("disk: division roundtrip over 10 seeded factors incl. {Q = 1} points", res, 1e-5);
    }

    // denominator integral
    {
        double res = std::abs(division_denominator(0.0) - Complex(1.0, 0.0));
        for (double h : {0.3, -0.8, 1.9}) {
            const Complex direct = (std::exp(Complex(0.0, -kTwoPi * h)) - Complex(1.0, 0.0)) /
                                   Complex(0.0, -kTwoPi * h);
            res = std::max(res, std::abs(division_denominator(h) - direct));
        }
        res = std::max(res, std::abs(division_denominator(1e-6) - division_denominator(0.0)) > 1e-5
                                ? 1.0
                                : 0.0);
        sink.add("division denominator: value 1 at h = 0, closed form elsewhere", res, 1e-12);
    }

    // obstruction: f that fails to vanish on {Q = 1}
    {
        bool threw = false;
        try {
            holonomy_division(*disk, [](const Point&) { return Complex(1.0, 0.0); }, {1.0, 0.0}, nc);
        } catch (const division_obstruction_error&) {
            threw = true;
        }
        sink.add_flag("disk: non-vanishing f raises a division obstruction", threw);
    }

    // focus-focus chart roundtrip, including points on the cone {h = 0}
    {
        const auto ff = make_model(ModelSpec::focus_focus());
        auto qfac_ff = [](const Point& p) {
            const double h = p[0] * p[3] - p[1] * p[2];
            return std::exp(Complex(0.0, -kTwoPi * h)) - Complex(1.0, 0.0);
        };
        Rng rng(cfg.seed + 31);
        std::vector<Point> pts = {{1.0, 1.0, 0.5, 0.5}, {0.01, 0.0, 0.0, 0.01}, {1.0, 0.0, 0.0, 1.0}};
        for (int s = 0; s < 5; ++s) pts.push_back(sampling::random_chart_point(*ff, rng, 1.5, 0.0));
        double res = 0.0;
        for (int fam = 0; fam < 3; ++fam) {
            const Coefficient g0 = sampling::random_trig_coefficient(ff, rng, 0.7);
            auto f = [g0, qfac_ff](const Point& p) { return qfac_ff(p) * g0.value(p); };
            for (const auto& p : pts)
                res = std::max(res, std::abs(holonomy_division(*ff, f, p, nc) - g0.value(p)));
        }
        sink.add("focus-focus: division roundtrip incl. cone points", res, 1e-5);
    }
}

inline void suite_bs(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;

    // cylinder window, against a scan-and-bisect oracle of is_bs_point
    {
        const auto cyl = make_model(ModelSpec::cylinder());
        const auto fibres = enumerate_bs_fibres(*cyl, Window::single(-2.5, 2.5));
        bool ok = fibres.size() == 5;
        for (size_t i = 0; i < fibres.size() && ok; ++i)
            ok = fibres[i].regularity == BSFibreRecord::Regularity::Regular && fibres[i].fibre_dim == 1 &&
                 std::abs(*fibres[i].label[0] - (static_cast<double>(i) - 2.0)) < 1e-12;

        int found = 0;
        double x = -2.5;
        const double step = 1e-3;
        while (x < 2.5 - step) {
            const double s0 = std::sin(kPi * x), s1 = std::sin(kPi * (x + step));
            if (s0 == 0.0 || (s0 < 0) != (s1 < 0)) {
                double lo = x, hi = x + step;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((std::sin(kPi * lo) < 0) != (std::sin(kPi * mid) < 0) ? hi : lo) = mid;
                }
                if (is_bs_point(*cyl, {0.5 * (lo + hi), 0.3}, nc)) ++found;
            }
            x += step;
        }
        sink.add_flag("cylinder: window (-2.5,2.5) holds labels {-2..2}", ok);
        sink.add_flag("cylinder: scan oracle confirms 5 BS leaves", found == 5);
    }

    // disk windows under both conventions
    {
        const auto disk = make_model(ModelSpec::disk());
        const auto transport = enumerate_bs_fibres(*disk, Window::single(0.0, 3.5));
        const auto printed =
            enumerate_bs_fibres(*disk, Window::single(0.0, 3.5), DiskConvention::PaperPrinted);
        bool ok = transport.size() == 2 && printed.size() == 4;
        if (ok)
            ok = *transport[0].label[0] == 0.0 && *transport[1].label[0] == 2.0 &&
                 transport[0].regularity == BSFibreRecord::Regularity::EllipticSingular &&
                 transport[1].regularity == BSFibreRecord::Regularity::Regular;
        if (ok)
            for (int i = 0; i < 4; ++i) ok = ok && *printed[i].label[0] == static_cast<double>(i);
        sink.add_flag("disk: windows {0,2} (transport) vs {0,1,2,3} (printed)", ok);
    }

    // enumerated labels are BS points; shifted labels are not
    {
        bool ok = true;
        struct Probe {
            ModelHandle model;
            Window window;
            DiskConvention conv;
        };
        std::vector<Probe> probes = {
            {make_model(ModelSpec::cylinder()), Window::single(-2.5, 2.5), DiskConvention::TransportOracle},
            {make_model(ModelSpec::disk()), Window::single(0.0, 3.5), DiskConvention::TransportOracle},
            {make_model(ModelSpec::disk()), Window::single(0.0, 3.5), DiskConvention::PaperPrinted},
            {make_model(ModelSpec::liouville(2, 1)), Window{{Interval{-0.5, 1.5}, std::nullopt}},
             DiskConvention::TransportOracle},
            {make_model(ModelSpec::focus_focus()), Window{{std::nullopt, Interval{-1.5, 2.5}}},
             DiskConvention::TransportOracle},
        };
        for (const auto& probe : probes) {
            const auto fibres = enumerate_bs_fibres(*probe.model, probe.window, probe.conv);
            ok = ok && !fibres.empty();
            for (const auto& f : fibres) {
                const Point p = sample_fibre_point(*probe.model, f.label);
                ok = ok && is_bs_point(*probe.model, p, nc, probe.conv);
                auto shifted = f.label;
                for (auto& c : shifted)
                    if (c) *c += 0.5;
                bool shifted_valid = true;
                for (size_t i = 0; i < shifted.size(); ++i)
                    if (shifted[i] && *shifted[i] < 0.0) shifted_valid = false;
                if (shifted_valid) {
                    const Point q = sample_fibre_point(*probe.model, shifted);
                    ok = ok && !is_bs_point(*probe.model, q, nc, probe.conv);
                }
            }
        }
        sink.add_flag("enumerated labels are BS points; labels + 1/2 are not", ok);
    }

    // liouville(2,1) family labels
    {
        const auto model = make_model(ModelSpec::liouville(2, 1));
        const auto fibres = enumerate_bs_fibres(*model, Window{{Interval{-0.5, 1.5}, std::nullopt}});
        const bool ok = fibres.size() == 2 && *fibres[0].label[0] == 0.0 && !fibres[0].label[1] &&
                        *fibres[1].label[0] == 1.0 && fibres[0].fibre_dim == 2 &&
                        fibres[0].regularity == BSFibreRecord::Regularity::Regular;
        sink.add_flag("liouville(2,1): labels (m, free) with m in {0,1}", ok);
    }

    // focus-focus labels and the singular fibre at f2 = 0
    {
        const auto ff = make_model(ModelSpec::focus_focus());
        const auto fibres = enumerate_bs_fibres(*ff, Window{{std::nullopt, Interval{-1.5, 2.5}}});
        bool ok = fibres.size() == 4;
        for (const auto& f : fibres) {
            if (!ok) break;
            const bool singular = std::abs(*f.label[1]) < 1e-12;
            ok = f.regularity == (singular ? BSFibreRecord::Regularity::FocusFocusSingular
                                           : BSFibreRecord::Regularity::Regular);
        }
        sink.add_flag("focus-focus: f2 labels {-1,0,1,2} with the 0 fibre marked singular", ok);
    }

    // BS sets are closed under the polarisation flows
    {
        bool ok = true;
        Rng rng(cfg.seed + 37);
        const auto model = make_model(ModelSpec::elliptic(2, 1));
        const auto fibres =
            enumerate_bs_fibres(*model, Window{{Interval{0.0, 4.5}, Interval{-1.5, 1.5}}});
        for (const auto& f : fibres) {
            const Point p = sample_fibre_point(*model, f.label);
            for (int g = 1; g <= model->rank(); ++g) {
                const Point q = model->flow(g, p, rng.uniform(0.1, 2.0));
                ok = ok && is_bs_point(*model, q, nc);
            }
        }
        sink.add_flag("BS property is preserved along every polarisation flow", ok);
    }

    // lattice examples and the brute-force oracle on random Delzant-type data
    {
        Polytope square{2, {{{1, 0}, 0.0}, {{-1, 0}, 3.0}, {{0, 1}, 0.0}, {{0, -1}, 3.0}}};
        const auto sq = lattice_points(square);
        sink.add_flag("square [0,3]^2: 4 interior, 12 boundary lattice points",
                      sq.interior.size() == 4 && sq.boundary.size() == 12);

        Polytope segment{1, {{{1}, 0.0}, {{-1}, 2.0}}};
        const auto seg = lattice_points(segment);
        sink.add_flag("segment [0,2]: interior {1}, boundary {0,2}",
                      seg.interior.size() == 1 && seg.interior[0][0] == 1 && seg.boundary.size() == 2);

        Polytope simplex{2, {{{1, 0}, 0.0}, {{0, 1}, 0.0}, {{-1, -1}, 2.0}}};
        const auto sx = lattice_points(simplex);
        sink.add_flag("simplex x,y >= 0, x+y <= 2: no interior point, 6 boundary points",
                      sx.interior.empty() && sx.boundary.size() == 6);

        // randomised agreement with a plain box scan
        Rng rng(cfg.seed + 41);
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            Polytope poly;
            poly.dim = rng.uniform_int(1, 3);
            const int shape = rng.uniform_int(0, 2);
            std::vector<long long> hi(poly.dim);
            for (int i = 0; i < poly.dim; ++i) hi[i] = rng.uniform_int(1, poly.dim == 3 ? 9 : 30);
            if (shape == 0 || poly.dim == 1) {  // box
                for (int i = 0; i < poly.dim; ++i) {
                    std::vector<long long> e(poly.dim, 0);
                    e[i] = 1;
                    poly.halfspaces.push_back({e, 0.0});
                    e[i] = -1;
                    poly.halfspaces.push_back({e, static_cast<double>(hi[i])});
                }
            } else if (shape == 1) {  // simplex
                for (int i = 0; i < poly.dim; ++i) {
                    std::vector<long long> e(poly.dim, 0);
                    e[i] = 1;
                    poly.halfspaces.push_back({e, 0.0});
                }
                poly.halfspaces.push_back(
                    {std::vector<long long>(poly.dim, -1), static_cast<double>(hi[0])});
            } else {  // sheared box (unimodular image)
                for (int i = 0; i < poly.dim; ++i) {
                    std::vector<long long> e(poly.dim, 0);
                    e[i] = 1;
                    if (i + 1 < poly.dim) e[i + 1] = 1;
                    poly.halfspaces.push_back({e, 0.0});
                    for (auto& c : e) c = -c;
                    poly.halfspaces.push_back({e, static_cast<double>(hi[i])});
                }
            }
            const auto fast = lattice_points(poly);

            // oracle: scan a generous box, classify by slack signs in doubles
            std::vector<std::vector<long long>> oi, ob;
            std::vector<long long> x(poly.dim, -40);
            while (true) {
                bool inside = true, boundary = false;
                for (const auto& hs : poly.halfspaces) {
                    double dot = hs.offset;
                    for (int i = 0; i < poly.dim; ++i)
                        dot += static_cast<double>(hs.normal[i] * x[i]);
                    if (dot < -0.5) inside = false;
                    else if (dot < 0.5 && std::abs(dot) < 1e-9) boundary = true;
                }
                if (inside) (boundary ? ob : oi).push_back(x);
                int i = 0;
                for (; i < poly.dim; ++i) {
                    if (++x[i] <= 40) break;
                    x[i] = -40;
                }
                if (i == poly.dim) break;
            }
            ok = fast.interior == oi && fast.boundary == ob;
        }
        sink.add_flag("lattice enumeration agrees with a brute-force scan on 20 random polytopes", ok);
    }
}

inline void suite_focusfocus(const RunConfig& cfg, std::vector<VerifyCase>& cases) {
    CaseSink sink{cases};
    const NumericsConfig& nc = cfg.numerics;
    const auto ff = make_model(ModelSpec::focus_focus());
    const auto disk = make_model(ModelSpec::disk());
    const VectorFieldId X2 = ff->generator_id(2);

    // J_X is the null operator at the disk origin (fixed point)
    {
        Rng rng(cfg.seed + 43);
        const PolarisedForm a = sampling::random_form(disk, 1, rng);
        sink.add("disk: J_X vanishes at the origin",
                 homotopy_operator(disk->generator_id(1), a, {0.0, 0.0}, nc).max_abs(), 1e-15);
    }

    // J_X vanishes on the locus x1 y2 = x2 y1 for the classes the phase
    // integrals actually kill: exact forms, and forms whose coordinate-basis
    // coefficients are invariant along the circle orbits (so only the
    // frequency +-1 harmonics of the orbit survive, and those integrate to
    // zero against e^{0}). A generic 1-form does not vanish there; see the
    // companion boundary case below.
    {
        Rng rng(cfg.seed + 47);
        auto locus_point = [&rng]() {
            Point p(4);
            p[0] = rng.uniform(-1.5, 1.5);
            p[1] = rng.uniform(-1.5, 1.5);
            const double lambda = rng.uniform(-1.5, 1.5);
            p[2] = lambda * p[0];
            p[3] = lambda * p[1];  // then x1 y2 - x2 y1 = 0
            if (std::hypot(std::hypot(p[0], p[1]), std::hypot(p[2], p[3])) < 1e-3) p[0] += 1.0;
            return p;
        };

        double res_exact = 0.0;
        for (int s = 0; s < cfg.samples / 2; ++s) {
            const PolarisedForm a = covariant_derivative(sampling::random_form(ff, 0, rng), nc);
            res_exact = std::max(res_exact, homotopy_operator(X2, a, locus_point(), nc).max_abs());
        }
        sink.add("focus-focus: J_X vanishes on {x1 y2 = x2 y1} for exact forms", res_exact, 1e-6);

        double res_inv = 0.0;
        for (int s = 0; s < cfg.samples / 2; ++s) {
            res_inv = std::max(
                res_inv,
                homotopy_operator(X2, sampling::random_invariant_coefficient_form(ff, rng),
                                  locus_point(), nc)
                    .max_abs());
        }
        sink.add("focus-focus: J_X vanishes on {x1 y2 = x2 y1} for invariant-coefficient forms",
                 res_inv, 1e-6);

        // boundary of the property: the form x1 dx2 restricted to the
        // polarisation has J_X = -pi at (1,0,0,0), so the vanishing cannot be
        // extended to arbitrary smooth coefficients
        PolarisedForm counter(ff, 1);
        counter.set_coefficient({1}, Coefficient{[ff](const Point& p) {
            return Complex(p[0] * ff->generator(1, p)[1], 0.0);
        }});
        counter.set_coefficient({2}, Coefficient{[ff](const Point& p) {
            return Complex(p[0] * ff->generator(2, p)[1], 0.0);
        }});
        const Complex j = homotopy_operator(X2, counter, {1.0, 0.0, 0.0, 0.0}, nc).coeffs.at({});
        sink.add("focus-focus: generic forms do not vanish on the locus (x1 dx2 gives -pi)",
                 std::abs(j - Complex(-kPi, 0.0)), 1e-6);
    }

    // the bound's phase integral against its closed form
    {
        double res = 0.0, res_mag = 0.0;
        for (double lambda : {0.1, 0.5, 1.7}) {
            const Complex quad = simpson(
                [lambda](double t) { return std::exp(Complex(0.0, -t * lambda)) * std::cos(t); }, kTwoPi,
                nc.quadrature_steps);
            const Complex closed = focusfocus_cos_integral_closed_form(lambda);
            res = std::max(res, std::abs(quad - closed));
            const double paper_mag =
                std::abs(lambda * (std::exp(Complex(0.0, -kTwoPi * lambda)) - Complex(1.0, 0.0)) /
                         (lambda * lambda - 1.0));
            res_mag = std::max(res_mag, std::abs(std::abs(quad) - paper_mag));
        }
        sink.add("focus-focus: quadrature matches the closed-form phase integral", res, 1e-8);
        sink.add("focus-focus: integral magnitude matches |lambda(e^{-2 pi i lambda}-1)/(lambda^2-1)|",
                 res_mag, 1e-8);
        const Complex at_zero =
            simpson([](double t) { return Complex(std::cos(t), 0.0); }, kTwoPi, 2048);
        sink.add("focus-focus: the integral vanishes at lambda = 0", std::abs(at_zero), 1e-12);
    }

    // holonomy on the focus-focus chart
    {
        Rng rng(cfg.seed + 53);
        double res = 0.0;
        for (int s = 0; s < 40; ++s) {
            const Point p = sampling::random_chart_point(*ff, rng, 1.5, 1e-2);
            const Holonomy h = holonomy_formula(*ff, {p, X2});
            const double f2 = p[0] * p[3] - p[1] * p[2];
            res = std::max(res, std::abs(h.value - std::exp(Complex(0.0, kTwoPi * f2))));
        }
        sink.add("focus-focus: Q = exp(i 2 pi (x1 y2 - x2 y1))", res, 1e-12);
    }
}

}  // namespace detail

/// Runs one verification suite (or "all") and returns the residual table.
inline VerifyReport run_verify(const std::string& suite, const RunConfig& cfg) {
    cfg.numerics.validate();
    VerifyReport rep;
    rep.suite = suite;
    rep.seed = cfg.seed;
    rep.samples = cfg.samples;

    const bool all = suite == "all";
    bool known = all;
    if (all || suite == "operators") known = true, detail::suite_operators(cfg, rep.cases);
    if (all || suite == "holonomy") known = true, detail::suite_holonomy(cfg, rep.cases);
    if (all || suite == "homotopy") known = true, detail::suite_homotopy(cfg, rep.cases);
    if (all || suite == "division") known = true, detail::suite_division(cfg, rep.cases);
    if (all || suite == "bs") known = true, detail::suite_bs(cfg, rep.cases);
    if (all || suite == "focusfocus") known = true, detail::suite_focusfocus(cfg, rep.cases);
    if (!known)
        throw invalid_spec_error("run_verify: unknown suite '" + suite +
                                 "' (expected operators|holonomy|homotopy|division|bs|focusfocus|all)");

    for (const auto& c : rep.cases) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

/// Canonical JSON for the residual table; byte-stable for a fixed seed.
inline std::string emit_verify_report(const VerifyReport& rep) {
    std::string s = "{\"schema_version\":1,\"suite\":";
    detail::append_escaped(s, rep.suite);
    s += ",\"seed\":" + std::to_string(rep.seed) + ",\"samples\":" + std::to_string(rep.samples) +
         ",\"cases\":[";
    for (size_t i = 0; i < rep.cases.size(); ++i) {
        if (i) s += ',';
        s += "{\"name\":";
        detail::append_escaped(s, rep.cases[i].name);
        s += ",\"residual\":" + detail::format_real(rep.cases[i].residual) +
             ",\"tolerance\":" + detail::format_real(rep.cases[i].tolerance) +
             ",\"pass\":" + (rep.cases[i].pass ? "true" : "false") + "}";
    }
    s += "],\"all_pass\":";
    s += rep.all_pass ? "true" : "false";
    s += "}";
    return s;
}

}  // namespace gq
