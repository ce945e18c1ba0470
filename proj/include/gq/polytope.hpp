// Convex polytopes as halfspace intersections, with exact integer lattice
// point enumeration split into interior and boundary points.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gq/numerics.hpp"

namespace gq {

/// One halfspace constraint: normal . x + offset >= 0.
struct Halfspace {
    std::vector<long long> normal;
    double offset = 0.0;
};

struct Polytope {
    int dim = 0;
    std::vector<Halfspace> halfspaces;

    void validate() const {
        if (dim < 1) throw invalid_spec_error("Polytope: dimension must be >= 1");
        if (halfspaces.empty()) throw invalid_spec_error("Polytope: no halfspaces");
        for (const auto& h : halfspaces) {
            if (static_cast<int>(h.normal.size()) != dim)
                throw invalid_spec_error("Polytope: halfspace normal has wrong dimension");
            bool nonzero = false;
            for (long long c : h.normal) nonzero = nonzero || c != 0;
            if (!nonzero) throw invalid_spec_error("Polytope: zero normal vector");
        }
    }
};

struct LatticePoints {
    std::vector<std::vector<long long>> interior;
    std::vector<std::vector<long long>> boundary;
};

namespace detail {

struct Row {
    std::vector<double> a;
    double c;
};

// Fourier-Motzkin elimination of every variable except `keep`, yielding an
// interval for that coordinate. Row counts stay tiny for the Delzant-type
// inputs handled here; a hard cap guards against pathological growth.
inline std::pair<double, double> fm_bounds(const Polytope& poly, int keep) {
    std::vector<Row> rows;
    rows.reserve(poly.halfspaces.size());
    for (const auto& h : poly.halfspaces) {
        Row r;
        r.a.assign(h.normal.begin(), h.normal.end());
        r.c = h.offset;
        rows.push_back(std::move(r));
    }
    for (int v = 0; v < poly.dim; ++v) {
        if (v == keep) continue;
        std::vector<Row> pos, neg, zero;
        for (auto& r : rows) {
            if (r.a[v] > 1e-12) pos.push_back(r);
            else if (r.a[v] < -1e-12) neg.push_back(r);
            else zero.push_back(r);
        }
        std::vector<Row> next = std::move(zero);
        for (const auto& p : pos)
            for (const auto& n : neg) {
                // p scaled by -a_n(v) > 0, n scaled by a_p(v) > 0
                const double sp = -n.a[v], sn = p.a[v];
                Row r;
                r.a.resize(poly.dim);
                for (int j = 0; j < poly.dim; ++j) r.a[j] = sp * p.a[j] + sn * n.a[j];
                r.c = sp * p.c + sn * n.c;
                next.push_back(std::move(r));
            }
        if (next.size() > 100000)
            throw invalid_spec_error("Polytope: Fourier-Motzkin row blowup; input too large");
        rows = std::move(next);
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        const double a = r.a[keep];
        if (a > 1e-12) lo = std::max(lo, -r.c / a);          // a x + c >= 0  =>  x >= -c/a
        else if (a < -1e-12) hi = std::min(hi, -r.c / a);    // x <= -c/a (= c/|a|)
        else if (r.c < -1e-9) return {1.0, 0.0};             // infeasible: empty interval
    }
    return {lo, hi};
}

}  // namespace detail

/// Integer bounding box of a bounded polytope. Throws on unbounded input.
inline std::vector<std::pair<long long, long long>> lattice_bounding_box(const Polytope& poly) {
    poly.validate();
    std::vector<std::pair<long long, long long>> box(poly.dim);
    for (int i = 0; i < poly.dim; ++i) {
        auto [lo, hi] = detail::fm_bounds(poly, i);
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw invalid_spec_error("Polytope: unbounded in coordinate " + std::to_string(i));
        box[i] = {static_cast<long long>(std::ceil(lo - 1e-9)),
                  static_cast<long long>(std::floor(hi + 1e-9))};
    }
    return box;
}

/// Enumerates integer points of a bounded polytope, classifying each point as
/// interior (all slacks strictly positive) or boundary (some slack zero).
/// Slacks normal . x are exact in 64-bit integers; offsets within 1e-9 of an
/// integer are classified by exact integer comparison, so Delzant-type data
/// with integral offsets is handled bit-exactly.
inline LatticePoints lattice_points(const Polytope& poly, long long max_candidates = 20000000) {
    const auto box = lattice_bounding_box(poly);
    long long candidates = 1;
    for (const auto& [lo, hi] : box) {
        if (hi < lo) return {};
        candidates *= (hi - lo + 1);
        if (candidates > max_candidates)
            throw invalid_spec_error("Polytope: candidate lattice set too large");
    }

    std::vector<long long> int_offsets(poly.halfspaces.size());
    std::vector<bool> offset_integral(poly.halfspaces.size());
    for (size_t j = 0; j < poly.halfspaces.size(); ++j) {
        const double c = poly.halfspaces[j].offset;
        const double r = std::round(c);
        offset_integral[j] = std::abs(c - r) < 1e-9;
        int_offsets[j] = static_cast<long long>(r);
    }

    LatticePoints out;
    std::vector<long long> x(poly.dim);
    for (int i = 0; i < poly.dim; ++i) x[i] = box[i].first;
    while (true) {
        bool inside = true, on_boundary = false;
        for (size_t j = 0; j < poly.halfspaces.size() && inside; ++j) {
            long long dot = 0;
            for (int i = 0; i < poly.dim; ++i) dot += poly.halfspaces[j].normal[i] * x[i];
            if (offset_integral[j]) {
                const long long slack = dot + int_offsets[j];
                if (slack < 0) inside = false;
                else if (slack == 0) on_boundary = true;
            } else {
                const double slack = static_cast<double>(dot) + poly.halfspaces[j].offset;
                if (slack < -1e-9) inside = false;
                else if (slack < 1e-9) on_boundary = true;
            }
        }
        if (inside) (on_boundary ? out.boundary : out.interior).push_back(x);

        int i = 0;
        for (; i < poly.dim; ++i) {
            if (++x[i] <= box[i].second) break;
            x[i] = box[i].first;
        }
        if (i == poly.dim) break;
    }
    return out;
}

}  // namespace gq
