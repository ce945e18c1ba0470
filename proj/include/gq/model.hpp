// Catalogue of local models: chart coordinates, symplectic potential in the
// distinguished unitary gauge, polarisation generators with closed-form flows,
// circle-action periods, and known flat sections.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gq/numerics.hpp"
#include "gq/polytope.hpp"

namespace gq {

enum class ModelKind { Cylinder, Disk, Linear, Liouville, Elliptic, FocusFocus, Product, ToricPolytope };

/// How holonomies of elliptic rotation factors are reported. The transport
/// oracle integrates one geometric period (angle 2t gives period pi); the
/// printed convention uses parameter period 2*pi instead, which doubles the
/// exponent and halves the Bohr-Sommerfeld lattice spacing.
enum class DiskConvention { TransportOracle, PaperPrinted };

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct ModelSpec {
    ModelKind kind = ModelKind::Cylinder;
    int n = 1;
    int k = 0;
    std::shared_ptr<ModelSpec> left, right;   // Product
    std::shared_ptr<Polytope> polytope;       // ToricPolytope
    std::vector<Interval> bounds;             // optional chart-bound overrides

    static ModelSpec cylinder() { return {ModelKind::Cylinder, 1, 0, nullptr, nullptr, {}}; }
    static ModelSpec disk() { return {ModelKind::Disk, 1, 0, nullptr, nullptr, {}}; }
    static ModelSpec linear(int n) { return {ModelKind::Linear, n, 0, nullptr, nullptr, {}}; }
    static ModelSpec liouville(int n, int k) { return {ModelKind::Liouville, n, k, nullptr, nullptr, {}}; }
    static ModelSpec elliptic(int n, int k) { return {ModelKind::Elliptic, n, k, nullptr, nullptr, {}}; }
    static ModelSpec focus_focus() { return {ModelKind::FocusFocus, 2, 0, nullptr, nullptr, {}}; }
    static ModelSpec product(ModelSpec l, ModelSpec r) {
        ModelSpec s;
        s.kind = ModelKind::Product;
        s.left = std::make_shared<ModelSpec>(std::move(l));
        s.right = std::make_shared<ModelSpec>(std::move(r));
        return s;
    }
    static ModelSpec toric(Polytope poly) {
        ModelSpec s;
        s.kind = ModelKind::ToricPolytope;
        s.polytope = std::make_shared<Polytope>(std::move(poly));
        return s;
    }

    bool contains_toric() const {
        if (kind == ModelKind::ToricPolytope) return true;
        if (kind == ModelKind::Product) return left->contains_toric() || right->contains_toric();
        return false;
    }
};

/// Selects one polarisation generator of a model.
struct VectorFieldId {
    int index = 1;  // 1-based
    bool is_circle_generator = false;
};

struct PeriodInfo {
    double value = 0.0;
    bool fixed_point = false;
};

/// The connection potential in the distinguished unitary gauge.
struct GaugeData {
    std::function<double(const Point&, const std::vector<double>&)> potential;
    std::string unitary_phase_label;
};

/// One component of the moment map, paired with the generator whose flow it
/// is constant along.
struct MomentComponent {
    enum class Kind { CylinderAction, LinearMomentum, EllipticEnergy, FocusFocusEnergy, FocusFocusAngular };
    Kind kind;
    int generator;  // 1-based

    bool quantised() const {
        return kind == Kind::CylinderAction || kind == Kind::EllipticEnergy ||
               kind == Kind::FocusFocusAngular;
    }
    double lattice_step(DiskConvention conv) const {
        if (kind == Kind::EllipticEnergy) return conv == DiskConvention::PaperPrinted ? 1.0 : 2.0;
        return 1.0;
    }
    bool nonnegative() const { return kind == Kind::EllipticEnergy; }
};

namespace detail {

enum class FactorKind { CylinderPair, LinearPair, EllipticPair, FocusFocusBlock };

struct Factor {
    FactorKind kind;
    int x1 = -1, y1 = -1, x2 = -1, y2 = -1;  // coordinate slots
    int first_generator = 1;                 // 1-based
    int generator_count() const { return kind == FactorKind::FocusFocusBlock ? 2 : 1; }
};

}  // namespace detail

class Model;
using ModelHandle = std::shared_ptr<const Model>;

/// Immutable chart model. All queries are pure; handles are safe to share.
class Model {
  public:
    explicit Model(ModelSpec spec) : spec_(std::move(spec)) { build(); }

    const ModelSpec& spec() const { return spec_; }
    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(generator_factor_.size()); }
    const std::vector<Interval>& bounds() const { return bounds_; }
    const std::vector<bool>& periodic() const { return periodic_; }
    const std::string& name() const { return name_; }

    bool is_product() const { return spec_.kind == ModelKind::Product; }
    const ModelHandle& left() const { return left_; }
    const ModelHandle& right() const { return right_; }
    int left_dim() const { return left_ ? left_->dim() : 0; }
    int left_rank() const { return left_ ? left_->rank() : 0; }

    void check_point(const Point& p) const {
        if (static_cast<int>(p.size()) != dim_)
            throw invalid_spec_error(name_ + ": point has dimension " + std::to_string(p.size()) +
                                     ", expected " + std::to_string(dim_));
        for (int i = 0; i < dim_; ++i)
            if (!periodic_[i] && (p[i] < bounds_[i].lo - 1e-12 || p[i] > bounds_[i].hi + 1e-12))
                throw invalid_spec_error(name_ + ": coordinate " + std::to_string(i) + " out of bounds");
    }

    Point reduce_angles(Point p) const {
        for (int i = 0; i < dim_; ++i)
            if (periodic_[i]) {
                p[i] = std::fmod(p[i], kTwoPi);
                if (p[i] < 0.0) p[i] += kTwoPi;
            }
        return p;
    }

    VectorFieldId generator_id(int i) const {
        check_generator(i);
        return {i, is_circle_generator(i)};
    }

    bool is_circle_generator(int i) const {
        check_generator(i);
        const auto& [f, slot] = locate(i);
        switch (f.kind) {
            case detail::FactorKind::CylinderPair: return true;
            case detail::FactorKind::EllipticPair: return true;
            case detail::FactorKind::LinearPair: return false;
            case detail::FactorKind::FocusFocusBlock: return slot == 1;  // X2 only
        }
        return false;
    }

    /// Components of generator i at p, in chart coordinate order.
    std::vector<double> generator(int i, const Point& p) const {
        check_generator(i);
        check_point(p);
        std::vector<double> v(dim_, 0.0);
        const auto& [f, slot] = locate(i);
        switch (f.kind) {
            case detail::FactorKind::CylinderPair:
            case detail::FactorKind::LinearPair:
                v[f.y1] = 1.0;
                break;
            case detail::FactorKind::EllipticPair:
                v[f.x1] = -2.0 * p[f.y1];
                v[f.y1] = 2.0 * p[f.x1];
                break;
            case detail::FactorKind::FocusFocusBlock:
                if (slot == 0) {  // X1 = -x1 dx1 - x2 dx2 + y1 dy1 + y2 dy2
                    v[f.x1] = -p[f.x1];
                    v[f.x2] = -p[f.x2];
                    v[f.y1] = p[f.y1];
                    v[f.y2] = p[f.y2];
                } else {  // X2 = x2 dx1 - x1 dx2 + y2 dy1 - y1 dy2
                    v[f.x1] = p[f.x2];
                    v[f.x2] = -p[f.x1];
                    v[f.y1] = p[f.y2];
                    v[f.y2] = -p[f.y1];
                }
                break;
        }
        return v;
    }

    bool is_fixed_point(int i, const Point& p) const {
        const auto v = generator(i, p);
        double norm2 = 0.0;
        for (double c : v) norm2 += c * c;
        return std::sqrt(norm2) < 1e-12;
    }

    /// Closed-form flow of generator i without angle reduction (chart cover).
    Point flow_raw(int i, const Point& p, double t) const {
        check_generator(i);
        check_point(p);
        Point q = p;
        const auto& [f, slot] = locate(i);
        switch (f.kind) {
            case detail::FactorKind::CylinderPair:
            case detail::FactorKind::LinearPair:
                q[f.y1] += t;
                break;
            case detail::FactorKind::EllipticPair: {
                const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
                const double x = p[f.x1], y = p[f.y1];
                q[f.x1] = x * c - y * s;
                q[f.y1] = x * s + y * c;
                break;
            }
            case detail::FactorKind::FocusFocusBlock:
                if (slot == 0) {
                    const double d = std::exp(-t), u = std::exp(t);
                    q[f.x1] = p[f.x1] * d;
                    q[f.x2] = p[f.x2] * d;
                    q[f.y1] = p[f.y1] * u;
                    q[f.y2] = p[f.y2] * u;
                } else {
                    const double c = std::cos(t), s = std::sin(t);
                    q[f.x1] = p[f.x1] * c + p[f.x2] * s;
                    q[f.x2] = p[f.x2] * c - p[f.x1] * s;
                    q[f.y1] = p[f.y1] * c + p[f.y2] * s;
                    q[f.y2] = p[f.y2] * c - p[f.y1] * s;
                }
                break;
        }
        return q;
    }

    /// Flow with angle coordinates reduced to [0, 2*pi).
    Point flow(int i, const Point& p, double t) const { return reduce_angles(flow_raw(i, p, t)); }

    PeriodInfo period(int i, const Point& p) const {
        if (!is_circle_generator(i))
            throw error(name_ + ": generator " + std::to_string(i) + " does not generate a circle action");
        if (is_fixed_point(i, p)) return {0.0, true};
        const auto& [f, slot] = locate(i);
        (void)slot;
        return {f.kind == detail::FactorKind::EllipticPair ? kPi : kTwoPi, false};
    }

    /// Parameter period used by the holonomy formula; equals the geometric
    /// period except for elliptic rotations under the printed convention.
    double holonomy_parameter_period(int i, const Point& p, DiskConvention conv) const {
        const PeriodInfo per = period(i, p);
        if (per.fixed_point) return 0.0;
        const auto& [f, slot] = locate(i);
        (void)slot;
        if (f.kind == detail::FactorKind::EllipticPair && conv == DiskConvention::PaperPrinted)
            return kTwoPi;
        return per.value;
    }

    /// The potential 1-form Theta of the distinguished unitary gauge,
    /// evaluated on tangent vector v at p.
    double theta(const Point& p, const std::vector<double>& v) const {
        check_point(p);
        double out = 0.0;
        for (const auto& f : factors_) {
            switch (f.kind) {
                case detail::FactorKind::CylinderPair:
                case detail::FactorKind::LinearPair:
                    out += p[f.x1] * v[f.y1];
                    break;
                case detail::FactorKind::EllipticPair:
                    out += 0.5 * (p[f.x1] * v[f.y1] - p[f.y1] * v[f.x1]);
                    break;
                case detail::FactorKind::FocusFocusBlock:
                    out += 0.5 * (p[f.x1] * v[f.y1] - p[f.y1] * v[f.x1] +
                                  p[f.x2] * v[f.y2] - p[f.y2] * v[f.x2]);
                    break;
            }
        }
        return out;
    }

    /// Theta(X_i) at p; the hamiltonian function of generator i.
    double hamiltonian(int i, const Point& p) const {
        check_generator(i);
        check_point(p);
        const auto& [f, slot] = locate(i);
        switch (f.kind) {
            case detail::FactorKind::CylinderPair:
            case detail::FactorKind::LinearPair:
                return p[f.x1];
            case detail::FactorKind::EllipticPair:
                return p[f.x1] * p[f.x1] + p[f.y1] * p[f.y1];
            case detail::FactorKind::FocusFocusBlock:
                if (slot == 0) return p[f.x1] * p[f.y1] + p[f.x2] * p[f.y2];
                return p[f.x1] * p[f.y2] - p[f.x2] * p[f.y1];
        }
        return 0.0;
    }

    /// Standard symplectic form of the chart on tangent vectors u, v.
    double omega(const Point& p, const std::vector<double>& u, const std::vector<double>& v) const {
        check_point(p);
        double out = 0.0;
        for (const auto& f : factors_) {
            out += u[f.x1] * v[f.y1] - u[f.y1] * v[f.x1];
            if (f.kind == detail::FactorKind::FocusFocusBlock)
                out += u[f.x2] * v[f.y2] - u[f.y2] * v[f.x2];
        }
        return out;
    }

    GaugeData gauge() const {
        GaugeData g;
        g.unitary_phase_label = unitary_phase_label_;
        g.potential = [self = *this](const Point& p, const std::vector<double>& v) {
            return self.theta(p, v);
        };
        return g;
    }

    const std::vector<MomentComponent>& moment_components() const { return moment_; }

    std::vector<double> moment_value(const Point& p) const {
        std::vector<double> out;
        out.reserve(moment_.size());
        for (const auto& c : moment_) out.push_back(hamiltonian(c.generator, p));
        return out;
    }

    const std::vector<detail::Factor>& factors() const { return factors_; }

  private:
    void check_generator(int i) const {
        if (i < 1 || i > rank())
            throw invalid_spec_error(name_ + ": generator index " + std::to_string(i) +
                                     " out of range 1.." + std::to_string(rank()));
    }

    std::pair<const detail::Factor&, int> locate(int i) const {
        const auto& f = factors_[generator_factor_[i - 1]];
        return {f, i - f.first_generator};
    }

    void build();

    ModelSpec spec_;
    int dim_ = 0;
    std::string name_;
    std::string unitary_phase_label_;
    std::vector<Interval> bounds_;
    std::vector<bool> periodic_;
    std::vector<detail::Factor> factors_;
    std::vector<int> generator_factor_;  // generator index -> factor slot
    std::vector<MomentComponent> moment_;
    ModelHandle left_, right_;
};

namespace detail {

// Appends factors of an elementary (non-product) model with the layout
// (x_1..x_n, y_1..y_n), coordinate slots shifted by `offset`.
inline void append_elementary(const ModelSpec& spec, int offset, std::vector<Factor>& factors,
                              std::vector<bool>& periodic, int& dim_accum) {
    auto pair_factor = [&](FactorKind kind, int j, int n) {
        Factor f;
        f.kind = kind;
        f.x1 = offset + j;
        f.y1 = offset + n + j;
        return f;
    };
    switch (spec.kind) {
        case ModelKind::Cylinder: {
            factors.push_back(pair_factor(FactorKind::CylinderPair, 0, 1));
            periodic.resize(dim_accum + 2, false);
            periodic[offset + 1] = true;
            dim_accum += 2;
            break;
        }
        case ModelKind::Disk: {
            factors.push_back(pair_factor(FactorKind::EllipticPair, 0, 1));
            periodic.resize(dim_accum + 2, false);
            dim_accum += 2;
            break;
        }
        case ModelKind::Linear: {
            for (int j = 0; j < spec.n; ++j) factors.push_back(pair_factor(FactorKind::LinearPair, j, spec.n));
            periodic.resize(dim_accum + 2 * spec.n, false);
            dim_accum += 2 * spec.n;
            break;
        }
        case ModelKind::Liouville: {
            for (int j = 0; j < spec.n; ++j) {
                factors.push_back(pair_factor(j < spec.k ? FactorKind::CylinderPair : FactorKind::LinearPair,
                                              j, spec.n));
            }
            periodic.resize(dim_accum + 2 * spec.n, false);
            for (int j = 0; j < spec.k; ++j) periodic[offset + spec.n + j] = true;
            dim_accum += 2 * spec.n;
            break;
        }
        case ModelKind::Elliptic: {
            for (int j = 0; j < spec.n; ++j) {
                factors.push_back(pair_factor(j < spec.k ? FactorKind::EllipticPair : FactorKind::CylinderPair,
                                              j, spec.n));
            }
            periodic.resize(dim_accum + 2 * spec.n, false);
            for (int j = spec.k; j < spec.n; ++j) periodic[offset + spec.n + j] = true;
            dim_accum += 2 * spec.n;
            break;
        }
        case ModelKind::FocusFocus: {
            Factor f;
            f.kind = FactorKind::FocusFocusBlock;
            f.x1 = offset;
            f.x2 = offset + 1;
            f.y1 = offset + 2;
            f.y2 = offset + 3;
            factors.push_back(f);
            periodic.resize(dim_accum + 4, false);
            dim_accum += 4;
            break;
        }
        default:
            throw invalid_spec_error("append_elementary: not an elementary chart model");
    }
}

inline std::string model_name(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::Cylinder: return "cylinder";
        case ModelKind::Disk: return "disk";
        case ModelKind::Linear: return "linear(" + std::to_string(spec.n) + ")";
        case ModelKind::Liouville:
            return "liouville(" + std::to_string(spec.n) + "," + std::to_string(spec.k) + ")";
        case ModelKind::Elliptic:
            return "elliptic(" + std::to_string(spec.n) + "," + std::to_string(spec.k) + ")";
        case ModelKind::FocusFocus: return "focus_focus";
        case ModelKind::Product: return "product(" + model_name(*spec.left) + "," + model_name(*spec.right) + ")";
        case ModelKind::ToricPolytope: return "toric_polytope";
    }
    return "?";
}

}  // namespace detail

inline void Model::build() {
    name_ = detail::model_name(spec_);
    switch (spec_.kind) {
        case ModelKind::ToricPolytope:
            throw invalid_spec_error("make_model: toric_polytope has no chart; quantise it via a fibration descriptor");
        case ModelKind::Linear:
            if (spec_.n < 1) throw invalid_spec_error("linear: n must be >= 1");
            break;
        case ModelKind::Liouville:
        case ModelKind::Elliptic:
            if (spec_.n < 1 || spec_.k < 0 || spec_.k > spec_.n)
                throw invalid_spec_error(name_ + ": requires 1 <= n and 0 <= k <= n");
            break;
        case ModelKind::Product:
            if (spec_.contains_toric())
                throw invalid_spec_error("product: toric_polytope factors have no chart");
            break;
        default:
            break;
    }

    if (spec_.kind == ModelKind::Product) {
        left_ = std::make_shared<const Model>(*spec_.left);
        right_ = std::make_shared<const Model>(*spec_.right);
        dim_ = left_->dim() + right_->dim();
        periodic_ = left_->periodic();
        periodic_.insert(periodic_.end(), right_->periodic().begin(), right_->periodic().end());
        factors_ = left_->factors();
        for (auto f : right_->factors()) {
            f.x1 += left_->dim();
            f.y1 += left_->dim();
            if (f.x2 >= 0) f.x2 += left_->dim();
            if (f.y2 >= 0) f.y2 += left_->dim();
            factors_.push_back(f);
        }
        unitary_phase_label_ = left_->unitary_phase_label_ + " * " + right_->unitary_phase_label_;
        bounds_ = left_->bounds();
        bounds_.insert(bounds_.end(), right_->bounds().begin(), right_->bounds().end());
    } else {
        int dim_accum = 0;
        detail::append_elementary(spec_, 0, factors_, periodic_, dim_accum);
        dim_ = dim_accum;
        bounds_.assign(dim_, Interval{});
        switch (spec_.kind) {
            case ModelKind::Cylinder: unitary_phase_label_ = "exp(i*x)"; break;
            case ModelKind::Disk: unitary_phase_label_ = "exp(i*(x^2+y^2))"; break;
            case ModelKind::Linear: unitary_phase_label_ = "exp(i*sum x_j)"; break;
            case ModelKind::Liouville: unitary_phase_label_ = "exp(i*sum x_j)"; break;
            case ModelKind::Elliptic:
                unitary_phase_label_ = "exp(i*(sum_{j<=k}(x_j^2+y_j^2) + sum_{j>k} x_j))";
                break;
            case ModelKind::FocusFocus: unitary_phase_label_ = "exp(i*(x1*y2-x2*y1))"; break;
            default: break;
        }
    }
    for (int i = 0; i < dim_; ++i)
        if (periodic_[i]) bounds_[i] = Interval{0.0, kTwoPi};
    if (!spec_.bounds.empty()) {
        if (static_cast<int>(spec_.bounds.size()) != dim_)
            throw invalid_spec_error(name_ + ": bounds override has wrong dimension");
        for (int i = 0; i < dim_; ++i)
            if (!periodic_[i]) bounds_[i] = spec_.bounds[i];
    }

    int g = 1;
    for (size_t s = 0; s < factors_.size(); ++s) {
        factors_[s].first_generator = g;
        for (int c = 0; c < factors_[s].generator_count(); ++c) {
            generator_factor_.push_back(static_cast<int>(s));
            ++g;
        }
    }

    for (const auto& f : factors_) {
        using FK = detail::FactorKind;
        switch (f.kind) {
            case FK::CylinderPair:
                moment_.push_back({MomentComponent::Kind::CylinderAction, f.first_generator});
                break;
            case FK::LinearPair:
                moment_.push_back({MomentComponent::Kind::LinearMomentum, f.first_generator});
                break;
            case FK::EllipticPair:
                moment_.push_back({MomentComponent::Kind::EllipticEnergy, f.first_generator});
                break;
            case FK::FocusFocusBlock:
                moment_.push_back({MomentComponent::Kind::FocusFocusEnergy, f.first_generator});
                moment_.push_back({MomentComponent::Kind::FocusFocusAngular, f.first_generator + 1});
                break;
        }
    }

    const int pair_count = [&] {
        int c = 0;
        for (const auto& f : factors_) c += f.generator_count();
        return c;
    }();
    if (2 * pair_count != dim_) throw invalid_spec_error(name_ + ": internal layout mismatch");
}

/// Validates the spec and returns an immutable handle.
inline ModelHandle make_model(const ModelSpec& spec) { return std::make_shared<const Model>(spec); }

/// Components of polarisation generator id at p.
inline std::vector<double> polarisation_generator(const Model& m, const VectorFieldId& id, const Point& p) {
    return m.generator(id.index, p);
}

/// Closed-form flat-section coefficient h(x) * exp(i sum x_j y_j) in the
/// distinguished gauge. Only the cylinder and linear models carry one.
inline std::optional<std::function<Complex(const Point&)>> flat_section_closed_form(
    const Model& m, std::function<Complex(const std::vector<double>&)> transverse_profile) {
    if (m.spec().kind != ModelKind::Cylinder && m.spec().kind != ModelKind::Linear) return std::nullopt;
    const int n = m.rank();
    return [n, profile = std::move(transverse_profile)](const Point& p) {
        std::vector<double> x(p.begin(), p.begin() + n);
        double phase = 0.0;
        for (int j = 0; j < n; ++j) phase += p[j] * p[n + j];
        return profile(x) * std::exp(Complex(0.0, phase));
    };
}

}  // namespace gq
