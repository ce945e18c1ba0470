// Bohr-Sommerfeld points and fibres: pointwise detection through holonomy,
// lattice enumeration of fibre labels over a window, and regularity
// classification.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "gq/circle_action.hpp"
#include "gq/model.hpp"
#include "gq/polytope.hpp"

namespace gq {

struct BSFibreRecord {
    enum class Regularity { Regular, EllipticSingular, FocusFocusSingular };

    std::vector<std::optional<double>> label;  // nullopt marks a continuum direction
    Regularity regularity = Regularity::Regular;
    int singular_rank = 0;  // number of vanishing elliptic components
    int fibre_dim = 0;
};

/// Per-moment-component window. Quantised directions must be bounded before
/// enumeration; free directions may stay unconstrained.
struct Window {
    std::vector<std::optional<Interval>> comp;

    static Window all_free(int m) {
        Window w;
        w.comp.assign(m, std::nullopt);
        return w;
    }
    static Window single(double lo, double hi) {
        Window w;
        w.comp.push_back(Interval{lo, hi});
        return w;
    }
};

/// True iff every circle generator has trivial holonomy at p (|Q - 1| < 1e-8,
/// the classification threshold). Non-compact generator directions impose no
/// condition.
inline bool is_bs_point(const Model& model, const Point& p, const NumericsConfig& cfg,
                        DiskConvention conv = DiskConvention::TransportOracle) {
    (void)cfg;
    for (int g = 1; g <= model.rank(); ++g) {
        if (!model.is_circle_generator(g)) continue;
        const Holonomy h = holonomy_formula(model, {p, model.generator_id(g)}, conv);
        if (std::abs(h.value - Complex(1.0, 0.0)) >= 1e-8) return false;
    }
    return true;
}

namespace detail {

inline std::vector<double> lattice_values(const Interval& window, double step, double offset,
                                          bool nonnegative) {
    std::vector<double> out;
    const double lo = nonnegative ? std::max(window.lo, 0.0) : window.lo;
    long long m = static_cast<long long>(std::ceil((lo - offset) / step - 1e-9));
    for (;; ++m) {
        const double v = offset + step * m;
        if (v >= window.hi - 1e-9) break;
        if (v < lo - 1e-9) continue;
        out.push_back(v);
        if (out.size() > 1000000) throw invalid_spec_error("enumerate_bs_fibres: window too large");
    }
    return out;
}

}  // namespace detail

/// One record per Bohr-Sommerfeld lattice value in the window. Labels of
/// circle-generated components are lattice points (integers, or the even
/// sublattice for elliptic energies under the transport convention);
/// continuum directions are reported as a fibre family with a free slot.
inline std::vector<BSFibreRecord> enumerate_bs_fibres(const Model& model, const Window& window,
                                                      DiskConvention conv = DiskConvention::TransportOracle,
                                                      const std::vector<double>& lattice_offset = {}) {
    const auto& comps = model.moment_components();
    if (!window.comp.empty() && window.comp.size() != comps.size())
        throw invalid_spec_error("enumerate_bs_fibres: window has " + std::to_string(window.comp.size()) +
                                 " components, moment map has " + std::to_string(comps.size()));
    if (!lattice_offset.empty() && lattice_offset.size() != comps.size())
        throw invalid_spec_error("enumerate_bs_fibres: lattice offset size mismatch");

    std::vector<std::vector<std::optional<double>>> axes(comps.size());
    for (size_t c = 0; c < comps.size(); ++c) {
        if (!comps[c].quantised()) {
            axes[c] = {std::nullopt};
            continue;
        }
        if (window.comp.empty() || !window.comp[c])
            throw invalid_spec_error("enumerate_bs_fibres: unbounded window in quantised direction " +
                                     std::to_string(c));
        const double offset = lattice_offset.empty() ? 0.0 : lattice_offset[c];
        for (double v : detail::lattice_values(*window.comp[c], comps[c].lattice_step(conv), offset,
                                               comps[c].nonnegative()))
            axes[c].push_back(v);
    }

    const int n = model.rank();
    std::vector<BSFibreRecord> out;
    for (const auto& axis : axes)
        if (axis.empty()) return out;
    std::vector<size_t> pick(comps.size(), 0);
    while (true) {
        BSFibreRecord rec;
        int elliptic_zeros = 0;
        bool ff_zero = false;
        for (size_t c = 0; c < comps.size(); ++c) {
            const auto v = axes[c][pick[c]];
            rec.label.push_back(v);
            if (!v) continue;
            if (comps[c].kind == MomentComponent::Kind::EllipticEnergy && std::abs(*v) < 1e-12)
                ++elliptic_zeros;
            if (comps[c].kind == MomentComponent::Kind::FocusFocusAngular && std::abs(*v) < 1e-12)
                ff_zero = true;
        }
        if (ff_zero) {
            rec.regularity = BSFibreRecord::Regularity::FocusFocusSingular;
            rec.fibre_dim = n - elliptic_zeros;
        } else if (elliptic_zeros > 0) {
            rec.regularity = BSFibreRecord::Regularity::EllipticSingular;
            rec.singular_rank = elliptic_zeros;
            rec.fibre_dim = n - elliptic_zeros;
        } else {
            rec.regularity = BSFibreRecord::Regularity::Regular;
            rec.fibre_dim = n;
        }
        out.push_back(std::move(rec));

        size_t c = 0;
        for (; c < comps.size(); ++c) {
            if (++pick[c] < axes[c].size()) break;
            pick[c] = 0;
        }
        if (c == comps.size()) break;
    }
    return out;
}

/// A chart point lying on the fibre with the given moment label (free slots
/// take generic values). Used to cross-check enumeration against is_bs_point.
inline Point sample_fibre_point(const Model& model, const std::vector<std::optional<double>>& label) {
    const auto& comps = model.moment_components();
    if (label.size() != comps.size())
        throw invalid_spec_error("sample_fibre_point: label size mismatch");
    Point p(model.dim(), 0.0);
    using FK = detail::FactorKind;
    size_t c = 0;
    for (const auto& f : model.factors()) {
        switch (f.kind) {
            case FK::CylinderPair:
            case FK::LinearPair:
                p[f.x1] = label[c] ? *label[c] : 0.3;
                p[f.y1] = 0.7;
                ++c;
                break;
            case FK::EllipticPair: {
                const double v = label[c] ? *label[c] : 0.5;
                if (v < -1e-12) throw invalid_spec_error("sample_fibre_point: negative elliptic label");
                p[f.x1] = std::sqrt(std::max(v, 0.0));
                p[f.y1] = 0.0;
                ++c;
                break;
            }
            case FK::FocusFocusBlock: {
                const double f1 = label[c] ? *label[c] : 0.4;
                const double f2 = label[c + 1] ? *label[c + 1] : 0.0;
                // x1 = 1, x2 = 0: then f1 = y1, f2 = y2.
                p[f.x1] = 1.0;
                p[f.x2] = 0.0;
                p[f.y1] = f1;
                p[f.y2] = f2;
                c += 2;
                break;
            }
        }
    }
    return p;
}

}  // namespace gq
