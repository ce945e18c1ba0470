// Line-bundle-valued polarised forms in the distinguished unitary gauge,
// with wedge, interior product, covariant derivative, Lie derivative, and
// parallel-transport-twisted pullback.
//
// A degree-k form is stored through its coefficients on increasing
// multi-indices of the generator co-basis; the line-bundle factor is the
// model's distinguished unitary section, so a section is just a degree-0
// coefficient. Since every catalogued generator family commutes and is
// invariant under the catalogued flows, d_P reduces to signed directional
// derivatives and the pullback acts on coefficients alone.
#pragma once

#include <map>
#include <memory>
#include <vector>

#include "gq/model.hpp"
#include "gq/numerics.hpp"

namespace gq {

using MultiIndex = std::vector<int>;  // strictly increasing, 1-based generator indices

enum class DerivativeMode { Analytic, FiniteDifference };

/// Complex coefficient function of a chart point, optionally with analytic
/// directional derivatives along the polarisation generators.
struct Coefficient {
    std::function<Complex(const Point&)> value;
    std::function<Complex(const Point&, int)> directional;  // may be empty

    Coefficient() = default;
    Coefficient(std::function<Complex(const Point&)> v) : value(std::move(v)) {}
    Coefficient(std::function<Complex(const Point&)> v, std::function<Complex(const Point&, int)> d)
        : value(std::move(v)), directional(std::move(d)) {}
};

/// Pointwise evaluation of a form: coefficient per stored multi-index.
struct FormValue {
    int degree = 0;
    std::map<MultiIndex, Complex> coeffs;

    double max_abs() const {
        double m = 0.0;
        for (const auto& [idx, z] : coeffs) m = std::max(m, std::abs(z));
        return m;
    }
};

/// Maximum coefficient difference over the union of stored indices.
inline double max_difference(const FormValue& a, const FormValue& b) {
    double m = 0.0;
    for (const auto& [idx, z] : a.coeffs) {
        auto it = b.coeffs.find(idx);
        m = std::max(m, std::abs(z - (it == b.coeffs.end() ? Complex{} : it->second)));
    }
    for (const auto& [idx, z] : b.coeffs)
        if (!a.coeffs.count(idx)) m = std::max(m, std::abs(z));
    return m;
}

namespace detail {

inline void check_multi_index(const MultiIndex& idx, int degree, int rank) {
    if (static_cast<int>(idx.size()) != degree)
        throw invalid_spec_error("multi-index length does not match form degree");
    for (size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] < 1 || idx[j] > rank) throw invalid_spec_error("multi-index entry out of range");
        if (j > 0 && idx[j] <= idx[j - 1]) throw invalid_spec_error("multi-index is not increasing");
    }
}

inline std::vector<MultiIndex> increasing_multi_indices(int rank, int degree) {
    std::vector<MultiIndex> out;
    if (degree < 0 || degree > rank) return out;
    MultiIndex idx(degree);
    for (int j = 0; j < degree; ++j) idx[j] = j + 1;
    while (true) {
        out.push_back(idx);
        if (degree == 0) break;
        int j = degree - 1;
        while (j >= 0 && idx[j] == rank - (degree - 1 - j)) --j;
        if (j < 0) break;
        ++idx[j];
        for (int l = j + 1; l < degree; ++l) idx[l] = idx[l - 1] + 1;
    }
    return out;
}

// Position g would take in the increasing index `without` (0-based count of
// smaller entries); the contraction sign is (-1)^position.
inline int insert_position(const MultiIndex& without, int g) {
    int pos = 0;
    while (pos < static_cast<int>(without.size()) && without[pos] < g) ++pos;
    return pos;
}

inline MultiIndex insert_index(const MultiIndex& without, int g) {
    MultiIndex idx = without;
    idx.insert(idx.begin() + insert_position(without, g), g);
    return idx;
}

}  // namespace detail

class PolarisedForm {
  public:
    PolarisedForm(ModelHandle model, int degree, DerivativeMode mode = DerivativeMode::FiniteDifference)
        : model_(std::move(model)), degree_(degree), mode_(mode) {
        if (!model_) throw invalid_spec_error("PolarisedForm: null model handle");
        if (degree_ < 0) throw invalid_spec_error("PolarisedForm: negative degree");
    }

    /// A degree-0 form (a section expressed against the unitary gauge).
    static PolarisedForm section(ModelHandle model, Coefficient c,
                                 DerivativeMode mode = DerivativeMode::FiniteDifference) {
        PolarisedForm f(std::move(model), 0, mode);
        f.set_coefficient({}, std::move(c));
        return f;
    }

    void set_coefficient(const MultiIndex& idx, Coefficient c) {
        detail::check_multi_index(idx, degree_, model_->rank());
        coeffs_[idx] = std::move(c);
    }

    const std::map<MultiIndex, Coefficient>& coefficients() const { return coeffs_; }
    int degree() const { return degree_; }
    const ModelHandle& model() const { return model_; }
    DerivativeMode mode() const { return mode_; }

    /// Number of finite-difference derivations already baked into the
    /// coefficients. Differentiating noisy values needs a wider step, so the
    /// effective step grows with this depth (h*, roughly (noise/|f'''|)^(1/3)).
    int fd_depth() const { return fd_depth_; }
    void set_fd_depth(int depth) { fd_depth_ = depth; }

    /// True when the degree alone forces the zero form (degree > rank), or no
    /// coefficients are stored.
    bool identically_zero() const { return degree_ > model_->rank() || coeffs_.empty(); }

    FormValue evaluate(const Point& p) const {
        FormValue v;
        v.degree = degree_;
        for (const auto& [idx, c] : coeffs_) v.coeffs[idx] = c.value(p);
        return v;
    }

    /// Directional derivative of the coefficient at `idx` along generator g,
    /// using analytic partials when available and requested, central
    /// differences along the generator flow otherwise.
    Complex coefficient_derivative(const MultiIndex& idx, int g, const Point& p,
                                   const NumericsConfig& cfg) const {
        auto it = coeffs_.find(idx);
        if (it == coeffs_.end()) return {};
        const Coefficient& c = it->second;
        if (mode_ == DerivativeMode::Analytic && c.directional) return c.directional(p, g);
        const double h = std::min(cfg.fd_step * std::pow(8.0, std::min(fd_depth_, 2)), 1e-3);
        return (c.value(model_->flow_raw(g, p, h)) - c.value(model_->flow_raw(g, p, -h))) / (2.0 * h);
    }

  private:
    ModelHandle model_;
    int degree_;
    DerivativeMode mode_;
    int fd_depth_ = 0;
    std::map<MultiIndex, Coefficient> coeffs_;
};

namespace detail {

inline void check_same_model(const PolarisedForm& a, const PolarisedForm& b, const char* op) {
    if (a.model().get() != b.model().get())
        throw invalid_spec_error(std::string(op) + ": forms live on different models");
}

}  // namespace detail

inline PolarisedForm operator+(const PolarisedForm& a, const PolarisedForm& b) {
    detail::check_same_model(a, b, "operator+");
    if (a.degree() != b.degree()) throw invalid_spec_error("operator+: degree mismatch");
    PolarisedForm out(a.model(), a.degree(),
                      a.mode() == DerivativeMode::Analytic && b.mode() == DerivativeMode::Analytic
                          ? DerivativeMode::Analytic
                          : DerivativeMode::FiniteDifference);
    std::map<MultiIndex, std::pair<const Coefficient*, const Coefficient*>> merged;
    for (const auto& [idx, c] : a.coefficients()) merged[idx].first = &c;
    for (const auto& [idx, c] : b.coefficients()) merged[idx].second = &c;
    for (const auto& [idx, pair] : merged) {
        const Coefficient ca = pair.first ? *pair.first : Coefficient{};
        const Coefficient cb = pair.second ? *pair.second : Coefficient{};
        Coefficient c;
        c.value = [ca, cb](const Point& p) {
            Complex z{};
            if (ca.value) z += ca.value(p);
            if (cb.value) z += cb.value(p);
            return z;
        };
        if ((!ca.value || ca.directional) && (!cb.value || cb.directional)) {
            c.directional = [ca, cb](const Point& p, int g) {
                Complex z{};
                if (ca.directional) z += ca.directional(p, g);
                if (cb.directional) z += cb.directional(p, g);
                return z;
            };
        }
        out.set_coefficient(idx, std::move(c));
    }
    out.set_fd_depth(std::max(a.fd_depth(), b.fd_depth()));
    return out;
}

/// Multiplies every coefficient by a scalar function (no analytic partials on
/// the result).
inline PolarisedForm scale(const PolarisedForm& a, std::function<Complex(const Point&)> factor) {
    PolarisedForm out(a.model(), a.degree());
    out.set_fd_depth(a.fd_depth());
    for (const auto& [idx, c] : a.coefficients()) {
        out.set_coefficient(idx, Coefficient{[f = factor, v = c.value](const Point& p) { return f(p) * v(p); }});
    }
    return out;
}

inline PolarisedForm scale(const PolarisedForm& a, Complex z) {
    PolarisedForm out(a.model(), a.degree(), a.mode());
    out.set_fd_depth(a.fd_depth());
    for (const auto& [idx, c] : a.coefficients()) {
        Coefficient sc;
        sc.value = [z, v = c.value](const Point& p) { return z * v(p); };
        if (c.directional) sc.directional = [z, d = c.directional](const Point& p, int g) { return z * d(p, g); };
        out.set_coefficient(idx, std::move(sc));
    }
    return out;
}

inline PolarisedForm operator-(const PolarisedForm& a, const PolarisedForm& b) {
    return a + scale(b, Complex(-1.0, 0.0));
}

/// Exterior (wedge) product with the standard alternating signs. Degrees
/// beyond the polarisation rank collapse to the zero form.
inline PolarisedForm wedge(const PolarisedForm& a, const PolarisedForm& b) {
    detail::check_same_model(a, b, "wedge");
    const int degree = a.degree() + b.degree();
    const DerivativeMode mode =
        a.mode() == DerivativeMode::Analytic && b.mode() == DerivativeMode::Analytic
            ? DerivativeMode::Analytic
            : DerivativeMode::FiniteDifference;
    PolarisedForm out(a.model(), degree, mode);
    out.set_fd_depth(std::max(a.fd_depth(), b.fd_depth()));
    if (degree > a.model()->rank()) return out;  // identically zero

    struct Term {
        double sign;
        Coefficient ca, cb;
    };
    for (const auto& target : detail::increasing_multi_indices(a.model()->rank(), degree)) {
        std::vector<Term> terms;
        const int ka = a.degree();
        // iterate subsets of `target` of size ka via bitmask
        const int len = degree;
        for (unsigned mask = 0; mask < (1u << len); ++mask) {
            if (__builtin_popcount(mask) != ka) continue;
            MultiIndex I, J;
            for (int j = 0; j < len; ++j) ((mask >> j) & 1u ? I : J).push_back(target[j]);
            auto ita = a.coefficients().find(I);
            auto itb = b.coefficients().find(J);
            if (ita == a.coefficients().end() || itb == b.coefficients().end()) continue;
            // parity of the shuffle (I, J) -> target: count pairs i in I, j in J with i > j
            int inversions = 0;
            for (int i : I)
                for (int j : J)
                    if (i > j) ++inversions;
            terms.push_back({inversions % 2 == 0 ? 1.0 : -1.0, ita->second, itb->second});
        }
        if (terms.empty()) continue;
        Coefficient c;
        c.value = [terms](const Point& p) {
            Complex z{};
            for (const auto& t : terms) z += t.sign * t.ca.value(p) * t.cb.value(p);
            return z;
        };
        bool analytic = true;
        for (const auto& t : terms) analytic = analytic && t.ca.directional && t.cb.directional;
        if (analytic) {
            c.directional = [terms](const Point& p, int g) {
                Complex z{};
                for (const auto& t : terms)
                    z += t.sign * (t.ca.directional(p, g) * t.cb.value(p) +
                                   t.ca.value(p) * t.cb.directional(p, g));
                return z;
            };
        }
        out.set_coefficient(target, std::move(c));
    }
    return out;
}

/// Contraction with polarisation generator X. Degree drops by one; degree-0
/// input is rejected (there is no degree -1 space).
inline PolarisedForm interior_product(const VectorFieldId& X, const PolarisedForm& a) {
    if (a.degree() == 0)
        throw error("interior_product: degree-0 input has no degree -1 image");
    const int g = X.index;
    if (g < 1 || g > a.model()->rank()) throw invalid_spec_error("interior_product: generator out of range");
    PolarisedForm out(a.model(), a.degree() - 1, a.mode());
    out.set_fd_depth(a.fd_depth());
    for (const auto& [idx, c] : a.coefficients()) {
        const auto pos = std::find(idx.begin(), idx.end(), g);
        if (pos == idx.end()) continue;
        const int m = static_cast<int>(pos - idx.begin());  // 0-based position
        MultiIndex J = idx;
        J.erase(J.begin() + m);
        const double sign = m % 2 == 0 ? 1.0 : -1.0;
        Coefficient cc;
        cc.value = [sign, v = c.value](const Point& p) { return sign * v(p); };
        if (c.directional)
            cc.directional = [sign, d = c.directional](const Point& p, int gg) { return sign * d(p, gg); };
        out.set_coefficient(J, std::move(cc));
    }
    return out;
}

inline PolarisedForm interior_product(int generator, const PolarisedForm& a) {
    return interior_product(a.model()->generator_id(generator), a);
}

namespace detail {

// Shared assembly of d_P (twist = 0) and the covariant derivative
// d_P - i Theta|_P /\ . (twist = 1): output coefficient on K is
//   sum_m (-1)^(m-1) [ X_{k_m}(a_{K\k_m}) - i twist H_{k_m} a_{K\k_m} ].
inline PolarisedForm derivation(const PolarisedForm& a, const NumericsConfig& cfg, double twist) {
    cfg.validate();
    const auto& model = a.model();
    const int degree = a.degree() + 1;
    PolarisedForm out(model, degree);
    bool analytic_all = a.mode() == DerivativeMode::Analytic;
    for (const auto& [idx, c] : a.coefficients()) analytic_all = analytic_all && bool(c.directional);
    out.set_fd_depth(a.fd_depth() + (analytic_all ? 0 : 1));
    if (degree > model->rank()) return out;  // trivially zero in top degree

    auto shared = std::make_shared<const PolarisedForm>(a);
    for (const auto& target : increasing_multi_indices(model->rank(), degree)) {
        struct Term {
            int gen;
            double sign;
            MultiIndex sub;
        };
        std::vector<Term> terms;
        for (size_t m = 0; m < target.size(); ++m) {
            MultiIndex sub = target;
            sub.erase(sub.begin() + m);
            if (!shared->coefficients().count(sub)) continue;
            terms.push_back({target[m], m % 2 == 0 ? 1.0 : -1.0, std::move(sub)});
        }
        if (terms.empty()) continue;
        Coefficient c;
        c.value = [shared, terms, cfg, twist, model](const Point& p) {
            Complex z{};
            for (const auto& t : terms) {
                z += t.sign * shared->coefficient_derivative(t.sub, t.gen, p, cfg);
                if (twist != 0.0) {
                    const Complex av = shared->coefficients().at(t.sub).value(p);
                    z -= t.sign * Complex(0.0, twist) * model->hamiltonian(t.gen, p) * av;
                }
            }
            return z;
        };
        out.set_coefficient(target, std::move(c));
    }
    return out;
}

}  // namespace detail

/// d_P: the polarised exterior derivative of the coefficient form alone
/// (no connection twist). Used by the Leibniz rule for ring multiplication.
inline PolarisedForm polarised_exterior_derivative(const PolarisedForm& a, const NumericsConfig& cfg) {
    return detail::derivation(a, cfg, 0.0);
}

/// The coboundary d of the Kostant complex: (d_P - i Theta|_P /\ .) in the
/// unitary gauge. Top-degree input yields the trivially-zero form of one
/// degree higher.
inline PolarisedForm covariant_derivative(const PolarisedForm& a, const NumericsConfig& cfg) {
    return detail::derivation(a, cfg, 1.0);
}

/// Cartan formula: i_X d + d i_X (the second term is dropped in degree 0).
inline PolarisedForm lie_derivative(const VectorFieldId& X, const PolarisedForm& a,
                                    const NumericsConfig& cfg) {
    PolarisedForm first = interior_product(X, covariant_derivative(a, cfg));
    if (a.degree() == 0) return first;
    return first + covariant_derivative(interior_product(X, a), cfg);
}

inline PolarisedForm lie_derivative(int generator, const PolarisedForm& a, const NumericsConfig& cfg) {
    return lie_derivative(a.model()->generator_id(generator), a, cfg);
}

/// Pullback along the time-t flow of generator X, twisted by the inverse
/// parallel transport of the gauge section. On the catalogued models the
/// generators are invariant under each other's flows, so only coefficients
/// transform: c(p) -> exp(-i t Theta(X)(p)) c(flow_t(p)).
inline PolarisedForm pullback(const VectorFieldId& X, double t, const PolarisedForm& a,
                              const NumericsConfig& cfg) {
    (void)cfg;
    const int g = X.index;
    const auto& model = a.model();
    if (g < 1 || g > model->rank()) throw invalid_spec_error("pullback: generator out of range");
    PolarisedForm out(model, a.degree(), a.mode());
    out.set_fd_depth(a.fd_depth());
    for (const auto& [idx, c] : a.coefficients()) {
        Coefficient cc;
        cc.value = [model, g, t, v = c.value](const Point& p) {
            const double H = model->hamiltonian(g, p);
            return std::exp(Complex(0.0, -t * H)) * v(model->flow_raw(g, p, t));
        };
        if (c.directional) {
            // Moment components are invariant along every generator, so the
            // phase factor differentiates to zero.
            cc.directional = [model, g, t, d = c.directional](const Point& p, int gg) {
                const double H = model->hamiltonian(g, p);
                return std::exp(Complex(0.0, -t * H)) * d(model->flow_raw(g, p, t), gg);
            };
        }
        out.set_coefficient(idx, std::move(cc));
    }
    return out;
}

inline PolarisedForm pullback(int generator, double t, const PolarisedForm& a, const NumericsConfig& cfg) {
    return pullback(a.model()->generator_id(generator), t, a, cfg);
}

}  // namespace gq
