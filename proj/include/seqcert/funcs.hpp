#pragma once

// A closed grammar of convex functions on sequence spaces.
//
//   f ::= limsup |x_n|
//       | sum_n w_n u_n(x_n)          (separable series, w_n >= 0)
//       | <p, x> + offset             (affine functional)
//       | f + ... + f
//       | lambda f                    (lambda >= 0)
//
// Every expression is convex. Values are computed as certified series and
// derivatives along basis directions have closed forms, both per index and,
// where the coefficient algebra allows, symbolically for the whole tail.

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "seqcert/closed_form.hpp"
#include "seqcert/error.hpp"
#include "seqcert/seqspace.hpp"
#include "seqcert/series.hpp"

namespace seqcert {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Left and right derivatives of a convex function of one variable.
struct OneSided {
    double left = 0.0;
    double right = 0.0;

    bool finite() const { return std::isfinite(left) && std::isfinite(right); }
    bool differentiable() const { return finite() && left == right; }
};

/// Convex scalar building blocks u_n.
struct ScalarConvex {
    enum class Kind { Abs, Square, AffineQuad, NegSqrt, Linear };

    Kind kind = Kind::Abs;
    double a = 0.0;   // AffineQuad: a t^2
    TailRule b{};     // AffineQuad / Linear: b_n t
    double c = 0.0;   // NegSqrt: -c sqrt(t)

    static ScalarConvex abs() { return {Kind::Abs}; }
    static ScalarConvex square() { return {Kind::Square}; }
    static ScalarConvex affine_quad(double a, TailRule b) {
        if (!(a >= 0.0) || !std::isfinite(a)) throw InvalidArgument("affine_quad requires a >= 0");
        return {Kind::AffineQuad, a, b, 0.0};
    }
    static ScalarConvex neg_sqrt(double c) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("neg_sqrt requires c >= 0");
        return {Kind::NegSqrt, 0.0, {}, c};
    }
    static ScalarConvex linear(TailRule b) { return {Kind::Linear, 0.0, b, 0.0}; }

    /// u_n(t); +inf outside the domain.
    double value(double t, std::size_t n) const {
        switch (kind) {
        case Kind::Abs: return std::abs(t);
        case Kind::Square: return t * t;
        case Kind::AffineQuad: return a * t * t + b(n) * t;
        case Kind::NegSqrt: return t < 0.0 ? kInf : -c * std::sqrt(t);
        case Kind::Linear: return b(n) * t;
        }
        return 0.0;
    }

    OneSided derivative(double t, std::size_t n) const {
        switch (kind) {
        case Kind::Abs:
            if (t > 0.0) return {1.0, 1.0};
            if (t < 0.0) return {-1.0, -1.0};
            return {-1.0, 1.0};
        case Kind::Square: return {2.0 * t, 2.0 * t};
        case Kind::AffineQuad: {
            const double d = 2.0 * a * t + b(n);
            return {d, d};
        }
        case Kind::NegSqrt: {
            if (t < 0.0) throw DomainViolation("neg_sqrt derivative requested at a negative coordinate");
            if (c == 0.0) return {0.0, 0.0};
            if (t == 0.0) return {-kInf, -kInf};
            const double d = -c / (2.0 * std::sqrt(t));
            return {d, d};
        }
        case Kind::Linear: return {b(n), b(n)};
        }
        return {};
    }

    friend bool operator==(const ScalarConvex&, const ScalarConvex&) = default;
};

inline const char* to_string(ScalarConvex::Kind k) {
    switch (k) {
    case ScalarConvex::Kind::Abs: return "abs";
    case ScalarConvex::Kind::Square: return "square";
    case ScalarConvex::Kind::AffineQuad: return "affine_quad";
    case ScalarConvex::Kind::NegSqrt: return "neg_sqrt";
    case ScalarConvex::Kind::Linear: return "linear";
    }
    return "?";
}

struct LimsupSeminorm {
    friend bool operator==(const LimsupSeminorm&, const LimsupSeminorm&) = default;
};

/// sum over n in [first, last] of weight(n) * inner(x_n); last == 0 means unbounded.
struct SeparableSeries {
    TailRule weight = TailRule::constant(1.0);
    ScalarConvex inner = ScalarConvex::abs();
    std::size_t first = 1;
    std::size_t last = 0;

    bool in_support(std::size_t n) const { return n >= first && (last == 0 || n <= last); }
    double weight_at(std::size_t n) const { return in_support(n) ? weight(n) : 0.0; }

    friend bool operator==(const SeparableSeries&, const SeparableSeries&) = default;
};

/// <p, x> + offset.
struct AffineFunctional {
    DualPoint p;
    double offset = 0.0;

    friend bool operator==(const AffineFunctional&, const AffineFunctional&) = default;
};

class FunctionExpr {
public:
    struct Node;

    FunctionExpr();
    FunctionExpr(LimsupSeminorm v);
    FunctionExpr(SeparableSeries v);
    FunctionExpr(AffineFunctional v);
    FunctionExpr(struct SumExpr v);
    FunctionExpr(struct ScaleExpr v);

    const Node& node() const { return *node_; }

    template <class T>
    const T* as() const;

    friend bool operator==(const FunctionExpr& a, const FunctionExpr& b);

private:
    std::shared_ptr<const Node> node_;
};

struct SumExpr {
    std::vector<FunctionExpr> terms;

    friend bool operator==(const SumExpr&, const SumExpr&) = default;
};

struct ScaleExpr {
    double lambda = 1.0;
    FunctionExpr f;

    friend bool operator==(const ScaleExpr&, const ScaleExpr&) = default;
};

struct FunctionExpr::Node {
    std::variant<LimsupSeminorm, SeparableSeries, AffineFunctional, SumExpr, ScaleExpr> value;
};

template <class T>
const T* FunctionExpr::as() const {
    return std::get_if<T>(&node_->value);
}

inline FunctionExpr::FunctionExpr() : FunctionExpr(SumExpr{}) {}
inline FunctionExpr::FunctionExpr(LimsupSeminorm v) : node_(std::make_shared<const Node>(Node{v})) {}
inline FunctionExpr::FunctionExpr(SeparableSeries v) {
    const auto& w = v.weight;
    const bool nonneg = w.c >= 0.0 && (w.kind != TailRule::Kind::Geometric || w.r >= 0.0);
    if (!nonneg) throw InvalidArgument("separable series weights must be nonnegative");
    if (v.first == 0) throw InvalidArgument("separable series support is 1-based");
    node_ = std::make_shared<const Node>(Node{std::move(v)});
}
inline FunctionExpr::FunctionExpr(AffineFunctional v) : node_(std::make_shared<const Node>(Node{std::move(v)})) {}
inline FunctionExpr::FunctionExpr(SumExpr v) : node_(std::make_shared<const Node>(Node{std::move(v)})) {}
inline FunctionExpr::FunctionExpr(ScaleExpr v) {
    if (!(v.lambda >= 0.0) || !std::isfinite(v.lambda)) throw NegativeScale("scale factor must be >= 0");
    node_ = std::make_shared<const Node>(Node{std::move(v)});
}

inline bool operator==(const FunctionExpr& a, const FunctionExpr& b) {
    return a.node_ == b.node_ || a.node_->value == b.node_->value;
}

// Builders.

inline FunctionExpr limsup_seminorm() { return LimsupSeminorm{}; }

inline FunctionExpr separable(TailRule weight, ScalarConvex inner) {
    return SeparableSeries{weight, inner, 1, 0};
}

/// ||x||_1.
inline FunctionExpr l1_norm() { return separable(TailRule::constant(1.0), ScalarConvex::abs()); }

inline FunctionExpr affine(DualPoint p, double offset = 0.0) { return AffineFunctional{std::move(p), offset}; }

inline FunctionExpr combine_sum(std::vector<FunctionExpr> fs) { return SumExpr{std::move(fs)}; }

inline FunctionExpr scale(double lambda, FunctionExpr f) { return ScaleExpr{lambda, std::move(f)}; }

/// f - <p, .>.
inline FunctionExpr subtract_linear(FunctionExpr f, const DualPoint& p) {
    return combine_sum({std::move(f), affine((-1.0) * p)});
}

/// Flattened summands lambda_i * g_i where no g_i is a sum or a scaling.
inline std::vector<std::pair<double, FunctionExpr>> summands(const FunctionExpr& f, double factor = 1.0) {
    std::vector<std::pair<double, FunctionExpr>> out;
    if (const auto* s = f.as<SumExpr>()) {
        for (const auto& t : s->terms) {
            auto sub = summands(t, factor);
            out.insert(out.end(), sub.begin(), sub.end());
        }
    } else if (const auto* sc = f.as<ScaleExpr>()) {
        return summands(sc->f, factor * sc->lambda);
    } else {
        out.emplace_back(factor, f);
    }
    return out;
}

namespace detail {

inline std::size_t count_leaves(const FunctionExpr& f) { return std::max<std::size_t>(summands(f).size(), 1); }

inline SeriesValue evaluate_limsup(const Point& x) {
    const auto cf = x.tail_form();
    if (!tail_majorant(cf, x.tail_start())) return SeriesValue::infinity();
    double plus = 0.0, minus = 0.0;
    for (const auto& m : cf.terms()) {
        if (!nearly_equal(m.exponent, 0.0)) continue;
        if (nearly_equal(m.base, 1.0)) plus += m.coef;
        if (nearly_equal(m.base, -1.0)) minus += m.coef;
    }
    return {std::max(std::abs(plus + minus), std::abs(plus - minus)), 0.0, 0};
}

// Bound on |inner(t)| over |t| <= s with coefficient bound bmax.
inline double inner_bound(const ScalarConvex& u, double s, double bmax) {
    switch (u.kind) {
    case ScalarConvex::Kind::Abs: return s;
    case ScalarConvex::Kind::Square: return s * s;
    case ScalarConvex::Kind::AffineQuad: return u.a * s * s + bmax * s;
    case ScalarConvex::Kind::NegSqrt: return u.c * std::sqrt(s);
    case ScalarConvex::Kind::Linear: return bmax * s;
    }
    return kInf;
}

// Geometric majorant of |w_n u_n(x_n)| for n >= from, or nullopt.
inline std::optional<GeometricMajorant> separable_majorant(const SeparableSeries& s, const Point& x,
                                                           std::size_t from) {
    if (s.last != 0) return GeometricMajorant{std::max(from, s.last + 1), 0.0, 0.0};
    const auto wm = tail_majorant(s.weight.closed_form(), from);
    const auto xm = tail_majorant(x.tail_form(), from);
    const auto bm = tail_majorant(s.inner.b.closed_form(), from);
    if (!wm || !xm || !bm) return std::nullopt;
    const double bmax = bm->at(from);
    const double xmax = xm->at(from);
    if (wm->at(from) == 0.0 || xmax == 0.0) return GeometricMajorant{from, 0.0, 0.0};
    if (wm->decays_geometrically()) {
        return GeometricMajorant{from, wm->geometric * inner_bound(s.inner, xmax, bmax), wm->ratio};
    }
    if (!xm->decays_geometrically()) return std::nullopt;
    const double wmax = wm->at(from);
    const double g = xm->geometric;
    const double rho = xm->ratio;
    switch (s.inner.kind) {
    case ScalarConvex::Kind::Abs: return GeometricMajorant{from, wmax * g, rho};
    case ScalarConvex::Kind::Square: return GeometricMajorant{from, wmax * xmax * g, rho};
    case ScalarConvex::Kind::AffineQuad: return GeometricMajorant{from, wmax * (s.inner.a * xmax + bmax) * g, rho};
    case ScalarConvex::Kind::Linear: return GeometricMajorant{from, wmax * bmax * g, rho};
    case ScalarConvex::Kind::NegSqrt:
        return GeometricMajorant{from, wmax * s.inner.c * std::sqrt(g), std::sqrt(rho)};
    }
    return std::nullopt;
}

// w_n u_n(x_n) as a closed form in n >= from, when the tail of x allows one.
inline std::optional<ClosedForm> separable_term_form(const SeparableSeries& s, const Point& x, std::size_t from) {
    const ClosedForm w = s.weight.closed_form(), t = x.tail_form(), b = s.inner.b.closed_form();
    switch (s.inner.kind) {
    case ScalarConvex::Kind::Abs: {
        const auto sign = strict_sign(t, from);
        if (!sign) return std::nullopt;
        return w * (static_cast<double>(*sign) * t);
    }
    case ScalarConvex::Kind::Square: return w * (t * t);
    case ScalarConvex::Kind::AffineQuad: return w * (s.inner.a * (t * t) + b * t);
    case ScalarConvex::Kind::Linear: return w * (b * t);
    case ScalarConvex::Kind::NegSqrt: {
        const auto r = t.sqrt();
        if (!r) return std::nullopt;
        return (-s.inner.c) * (w * *r);
    }
    }
    return std::nullopt;
}

// Unbounded-support series without a geometric majorant: sum the tail in
// closed form, or report divergence to +inf when the terms are eventually positive.
inline SeriesValue evaluate_separable_closed_form(const SeparableSeries& s, const Point& x, std::size_t from,
                                                  double tol) {
    const auto form = separable_term_form(s, x, from);
    if (!form) throw NoMajorant("separable series: no majorant or closed form for this weight, inner function and tail");
    CompensatedSum head;
    for (std::size_t n = s.first; n < from; ++n) head.add(s.weight_at(n) * s.inner.value(x.coordinate(n), n));
    if (const auto rest = try_sum_closed_form(*form, from, tol))
        return SeriesValue{head.value(), head.rounding_bound(), head.count()} + *rest;
    if (strict_sign(*form, from) == 1) return SeriesValue::infinity();
    throw NoMajorant("separable series does not converge to a finite value or to +inf");
}

inline SeriesValue evaluate_separable(const SeparableSeries& s, const Point& x, double tol) {
    const std::size_t from = std::max(x.tail_start(), s.first);
    if (s.inner.kind == ScalarConvex::Kind::NegSqrt && s.inner.c > 0.0 && !s.weight.is_zero() &&
        (s.last == 0 || s.last >= from)) {
        const auto ok = nonnegative(x.tail_form(), from);
        if (!ok) throw DomainViolation("cannot decide the sign of the tail under a square root");
        if (!*ok) return SeriesValue::infinity();
    }
    const auto maj = separable_majorant(s, x, from);
    if (!maj) return evaluate_separable_closed_form(s, x, from, tol);
    auto term = [&](std::size_t n) {
        const double w = s.weight_at(n);
        if (w == 0.0) return 0.0;
        return w * s.inner.value(x.coordinate(n), n);
    };
    return certified_series(term, *maj, tol, s.first);
}

} // namespace detail

/// f(x) as a certified series; value is +inf outside the domain of f.
inline SeriesValue evaluate(const FunctionExpr& f, const Point& x, double tol = kDefaultSeriesTol) {
    struct Visitor {
        const Point& x;
        double tol;

        SeriesValue operator()(const LimsupSeminorm&) const { return detail::evaluate_limsup(x); }
        SeriesValue operator()(const SeparableSeries& s) const { return detail::evaluate_separable(s, x, tol); }
        SeriesValue operator()(const AffineFunctional& a) const {
            auto v = pair(a.p, x, tol);
            v.value += a.offset;
            return v;
        }
        SeriesValue operator()(const SumExpr& s) const {
            SeriesValue acc;
            const double each = tol / static_cast<double>(std::max<std::size_t>(s.terms.size(), 1));
            for (const auto& t : s.terms) {
                const auto v = evaluate(t, x, each);
                if (v.is_infinite()) return SeriesValue::infinity();
                acc = acc + v;
            }
            return acc;
        }
        SeriesValue operator()(const ScaleExpr& s) const {
            if (s.lambda == 0.0) {
                const auto v = evaluate(s.f, x, tol);
                return v.is_infinite() ? v : SeriesValue{};
            }
            return s.lambda * evaluate(s.f, x, tol / s.lambda);
        }
    };
    return std::visit(Visitor{x, tol}, f.node().value);
}

/// f(x), throwing DomainViolation when x is outside the domain.
inline SeriesValue evaluate_finite(const FunctionExpr& f, const Point& x, double tol = kDefaultSeriesTol) {
    auto v = evaluate(f, x, tol);
    if (v.is_infinite()) throw DomainViolation("point lies outside the domain of the function");
    return v;
}

/// One-sided derivatives of f at x along e_n, from closed forms.
inline OneSided one_sided_derivative(const FunctionExpr& f, const Point& x, std::size_t n) {
    if (n == 0) throw InvalidArgument("basis directions are 1-based");
    struct Visitor {
        const Point& x;
        std::size_t n;

        OneSided operator()(const LimsupSeminorm&) const { return {0.0, 0.0}; }
        OneSided operator()(const SeparableSeries& s) const {
            const double w = s.weight_at(n);
            const auto d = s.inner.derivative(x.coordinate(n), n);
            if (w == 0.0) return {0.0, 0.0};
            return {w * d.left, w * d.right};
        }
        OneSided operator()(const AffineFunctional& a) const {
            const double v = a.p.coordinate(n);
            return {v, v};
        }
        OneSided operator()(const SumExpr& s) const {
            OneSided acc;
            for (const auto& t : s.terms) {
                const auto d = one_sided_derivative(t, x, n);
                acc.left += d.left;
                acc.right += d.right;
            }
            return acc;
        }
        OneSided operator()(const ScaleExpr& s) const {
            if (s.lambda == 0.0) return {0.0, 0.0};
            const auto d = one_sided_derivative(s.f, x, n);
            return {s.lambda * d.left, s.lambda * d.right};
        }
    };
    return std::visit(Visitor{x, n}, f.node().value);
}

/// Outcome of a closed-form directional derivative along a basis vector.
struct AnalyticDerivative {
    enum class Status { Exists, NotDifferentiable, Unavailable };

    Status status = Status::Unavailable;
    double left = 0.0;
    double right = 0.0;

    bool exists() const { return status == Status::Exists; }
    double value() const { return exists() ? right : std::numeric_limits<double>::quiet_NaN(); }
};

inline AnalyticDerivative analytic_dir_deriv(const FunctionExpr& f, const Point& x, std::size_t n) {
    const auto d = one_sided_derivative(f, x, n);
    const auto status = d.differentiable() ? AnalyticDerivative::Status::Exists
                                           : AnalyticDerivative::Status::NotDifferentiable;
    return {status, d.left, d.right};
}

/// Derivatives along e_n for every n >= from, as closed forms in n.
struct TailDerivative {
    std::size_t from = 1;
    ClosedForm left;
    ClosedForm right;
    bool infinite = false; // some one-sided derivative is infinite for every n >= from

    bool exists_everywhere() const { return !infinite && (right - left).is_zero(); }
};

namespace detail {

inline std::optional<TailDerivative> tail_derivative_at(const FunctionExpr& f, const Point& x, std::size_t from);

inline std::optional<TailDerivative> separable_tail_derivative(const SeparableSeries& s, const Point& x,
                                                               std::size_t from) {
    TailDerivative out{from, {}, {}, false};
    if (s.last != 0 && from > s.last) return out;
    if (s.last != 0 || from < s.first) return std::nullopt;
    const ClosedForm w = s.weight.closed_form();
    const ClosedForm t = x.tail_form();
    switch (s.inner.kind) {
    case ScalarConvex::Kind::Abs: {
        const auto sg = strict_sign(t, from);
        if (sg && *sg == 0) {
            out.left = (-1.0) * w;
            out.right = w;
            return out;
        }
        std::optional<ClosedForm> sign;
        if (sg) sign = ClosedForm::constant(static_cast<double>(*sg));
        else sign = t.sign();
        if (!sign) return std::nullopt;
        out.left = out.right = w * *sign;
        return out;
    }
    case ScalarConvex::Kind::Square:
        out.left = out.right = 2.0 * (w * t);
        return out;
    case ScalarConvex::Kind::AffineQuad:
        out.left = out.right = w * (2.0 * s.inner.a * t + s.inner.b.closed_form());
        return out;
    case ScalarConvex::Kind::Linear:
        out.left = out.right = w * s.inner.b.closed_form();
        return out;
    case ScalarConvex::Kind::NegSqrt: {
        if (s.inner.c == 0.0 || w.is_zero()) return out;
        const auto sg = strict_sign(t, from);
        if (sg && *sg == 0) {
            out.infinite = true;
            return out;
        }
        if (sg && *sg < 0) throw DomainViolation("neg_sqrt derivative requested on a negative tail");
        if (!sg) return std::nullopt;
        const auto root = t.sqrt();
        if (!root) return std::nullopt;
        const auto inv = root->reciprocal();
        if (!inv) return std::nullopt;
        out.left = out.right = (-0.5 * s.inner.c) * (w * *inv);
        return out;
    }
    }
    return std::nullopt;
}

inline std::optional<TailDerivative> tail_derivative_at(const FunctionExpr& f, const Point& x, std::size_t from) {
    if (const auto* s = f.as<SeparableSeries>()) return separable_tail_derivative(*s, x, from);
    if (f.as<LimsupSeminorm>()) return TailDerivative{from, {}, {}, false};
    if (const auto* a = f.as<AffineFunctional>()) {
        const auto cf = a->p.tail_form();
        return TailDerivative{from, cf, cf, false};
    }
    if (const auto* sum = f.as<SumExpr>()) {
        TailDerivative acc{from, {}, {}, false};
        for (const auto& t : sum->terms) {
            const auto d = tail_derivative_at(t, x, from);
            if (!d) return std::nullopt;
            acc.left = acc.left + d->left;
            acc.right = acc.right + d->right;
            acc.infinite = acc.infinite || d->infinite;
        }
        return acc;
    }
    if (const auto* sc = f.as<ScaleExpr>()) {
        if (sc->lambda == 0.0) return TailDerivative{from, {}, {}, false};
        auto d = tail_derivative_at(sc->f, x, from);
        if (!d) return std::nullopt;
        d->left = sc->lambda * d->left;
        d->right = sc->lambda * d->right;
        return d;
    }
    return std::nullopt;
}

// First index from which every leaf of f is governed by closed forms at x.
inline std::size_t closed_form_start(const FunctionExpr& f, const Point& x) {
    std::size_t from = x.tail_start();
    for (const auto& [lambda, g] : summands(f)) {
        if (const auto* a = g.as<AffineFunctional>()) from = std::max(from, a->p.tail_start());
        if (const auto* s = g.as<SeparableSeries>()) {
            from = std::max(from, s->first);
            if (s->last != 0) from = std::max(from, s->last + 1);
        }
    }
    return from;
}

} // namespace detail

/// Symbolic derivatives along e_n for all n >= from (from is chosen automatically).
///
/// nullopt when some leaf has no closed form over the coefficient algebra
/// (e.g. |.| or sqrt over a tail of undecided sign).
inline std::optional<TailDerivative> tail_derivative(const FunctionExpr& f, const Point& x) {
    return detail::tail_derivative_at(f, x, detail::closed_form_start(f, x));
}

/// Whether f is finite and continuous on the whole space (used for the
/// upper-semicontinuity and Gateaux criteria).
inline bool continuous_on(const FunctionExpr& f, const SpaceDescriptor& space) {
    for (const auto& [lambda, g] : summands(f)) {
        if (lambda == 0.0) continue;
        if (g.as<LimsupSeminorm>()) {
            // limsup is norm-continuous on l-infinity, identically 0 on l1 and
            // not finite on R^N.
            if (space.kind == SpaceKind::RN) return false;
        } else if (const auto* a = g.as<AffineFunctional>()) {
            if (space.kind == SpaceKind::RN && !a->p.has_zero_tail()) return false;
            if (space.kind == SpaceKind::EllInf && !in_ell1(to_primal(a->p))) return false;
            if (space.kind == SpaceKind::Ell1 && !in_ellinf(to_primal(a->p))) return false;
        } else if (const auto* s = g.as<SeparableSeries>()) {
            if (s->inner.kind == ScalarConvex::Kind::NegSqrt && s->inner.c > 0.0 && !s->weight.is_zero()) return false;
            const bool finite_support = s->last != 0 || s->weight.is_zero();
            switch (space.kind) {
            case SpaceKind::RN:
                if (!finite_support) return false;
                break;
            case SpaceKind::Ell1:
                // u_n(0) = 0 and locally Lipschitz with bounded coefficients.
                if (!tail_majorant(s->weight.closed_form(), 1) || !tail_majorant(s->inner.b.closed_form(), 1))
                    return false;
                break;
            case SpaceKind::EllInf: {
                if (finite_support) break;
                const auto wm = tail_majorant(s->weight.closed_form(), 1);
                if (!wm || !wm->decays_geometrically()) return false;
                break;
            }
            }
        }
    }
    return true;
}

} // namespace seqcert
