#pragma once

// Points and dual elements of sequence spaces.
//
// A sequence is stored exactly as a finite prefix (indices 1..m) followed by a
// tail given by a sum of closed-form rules. All indices are 1-based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqcert/closed_form.hpp"
#include "seqcert/error.hpp"
#include "seqcert/series.hpp"

namespace seqcert {

/// Value of a sequence beyond its prefix: 0, c, c r^n or c / n.
struct TailRule {
    enum class Kind { Zero, Const, Geometric, Harmonic };

    Kind kind = Kind::Zero;
    double c = 0.0;
    double r = 0.0;

    static TailRule zero() { return {}; }
    static TailRule constant(double c) { return checked({Kind::Const, c, 0.0}); }
    static TailRule geometric(double c, double r) { return checked({Kind::Geometric, c, r}); }
    static TailRule harmonic(double c) { return checked({Kind::Harmonic, c, 0.0}); }

    double operator()(std::size_t n) const {
        switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Const: return c;
        case Kind::Geometric: return c * std::pow(r, static_cast<double>(n));
        case Kind::Harmonic: return c / static_cast<double>(n);
        }
        return 0.0;
    }

    ClosedForm closed_form() const {
        switch (kind) {
        case Kind::Zero: return {};
        case Kind::Const: return ClosedForm::constant(c);
        case Kind::Geometric: return ClosedForm::monomial(c, r, 0.0);
        case Kind::Harmonic: return ClosedForm::monomial(c, 1.0, -1.0);
        }
        return {};
    }

    bool is_zero() const {
        return kind == Kind::Zero || c == 0.0 || (kind == Kind::Geometric && r == 0.0);
    }

    friend bool operator==(const TailRule&, const TailRule&) = default;

private:
    static TailRule checked(TailRule t) {
        if (!std::isfinite(t.c) || !std::isfinite(t.r))
            throw InvalidArgument("tail rule coefficients must be finite");
        if (t.kind == Kind::Geometric && !(std::abs(t.r) < 1.0))
            throw InvalidArgument("geometric tail requires |r| < 1");
        return t;
    }
};

inline const char* to_string(TailRule::Kind k) {
    switch (k) {
    case TailRule::Kind::Zero: return "zero";
    case TailRule::Kind::Const: return "const";
    case TailRule::Kind::Geometric: return "geometric";
    case TailRule::Kind::Harmonic: return "harmonic";
    }
    return "?";
}

struct PrimalTag {};
struct DualTag {};

/// Exact sequence: finite prefix plus a tail that is a sum of TailRules.
///
/// Point (elements of E) and DualPoint (elements of E*) share this
/// representation but are distinct types.
template <class Tag>
class Sequence {
public:
    Sequence() = default;

    Sequence(std::vector<double> prefix, TailRule tail = TailRule::zero())
        : Sequence(std::move(prefix), std::vector<TailRule>{tail}) {}

    Sequence(std::vector<double> prefix, std::vector<TailRule> tail)
        : prefix_(std::move(prefix)), tail_(std::move(tail)) {
        for (double v : prefix_)
            if (!std::isfinite(v)) throw InvalidArgument("sequence prefix entries must be finite");
        normalize_tail();
    }

    static Sequence zero() { return {}; }

    const std::vector<double>& prefix() const { return prefix_; }
    const std::vector<TailRule>& tail() const { return tail_; }

    /// First index governed by the tail.
    std::size_t tail_start() const { return prefix_.size() + 1; }

    double coordinate(std::size_t n) const {
        if (n == 0) throw InvalidArgument("coordinates are 1-based");
        if (n <= prefix_.size()) return prefix_[n - 1];
        double v = 0.0;
        for (const auto& t : tail_) v += t(n);
        return v;
    }

    double operator[](std::size_t n) const { return coordinate(n); }

    ClosedForm tail_form() const {
        ClosedForm cf;
        for (const auto& t : tail_) cf = cf + t.closed_form();
        return cf;
    }

    bool has_zero_tail() const { return tail_.empty(); }

    /// The tail is a single rule (or zero), i.e. directly expressible in the rule grammar.
    bool has_simple_tail() const { return tail_.size() <= 1; }

    friend bool operator==(const Sequence&, const Sequence&) = default;

    friend Sequence operator+(const Sequence& a, const Sequence& b) {
        const std::size_t m = std::max(a.prefix_.size(), b.prefix_.size());
        std::vector<double> prefix(m);
        for (std::size_t n = 1; n <= m; ++n) prefix[n - 1] = a.coordinate(n) + b.coordinate(n);
        std::vector<TailRule> tail = a.tail_;
        tail.insert(tail.end(), b.tail_.begin(), b.tail_.end());
        return {std::move(prefix), std::move(tail)};
    }

    friend Sequence operator*(double s, const Sequence& a) {
        if (!std::isfinite(s)) throw InvalidArgument("sequence scale must be finite");
        std::vector<double> prefix = a.prefix_;
        for (auto& v : prefix) v *= s;
        std::vector<TailRule> tail = a.tail_;
        for (auto& t : tail) t.c *= s;
        return {std::move(prefix), std::move(tail)};
    }

    friend Sequence operator-(const Sequence& a, const Sequence& b) { return a + (-1.0) * b; }

private:
    void normalize_tail() {
        double konst = 0.0, harm = 0.0;
        std::vector<TailRule> geo;
        for (const auto& t : tail_) {
            switch (t.kind) {
            case TailRule::Kind::Zero: break;
            case TailRule::Kind::Const: konst += t.c; break;
            case TailRule::Kind::Harmonic: harm += t.c; break;
            case TailRule::Kind::Geometric: {
                if (!(std::abs(t.r) < 1.0)) throw InvalidArgument("geometric tail requires |r| < 1");
                auto it = std::find_if(geo.begin(), geo.end(), [&](const TailRule& g) { return g.r == t.r; });
                if (it == geo.end())
                    geo.push_back(t);
                else
                    it->c += t.c;
                break;
            }
            }
        }
        tail_.clear();
        if (konst != 0.0) tail_.push_back(TailRule::constant(konst));
        std::sort(geo.begin(), geo.end(), [](const TailRule& a, const TailRule& b) { return a.r < b.r; });
        for (const auto& g : geo)
            if (!g.is_zero()) tail_.push_back(g);
        if (harm != 0.0) tail_.push_back(TailRule::harmonic(harm));
        // Trailing prefix entries equal to the tail value are kept: the prefix
        // length is part of the representation (projections rely on it).
    }

    std::vector<double> prefix_;
    std::vector<TailRule> tail_;
};

using Point = Sequence<PrimalTag>;
using DualPoint = Sequence<DualTag>;

inline DualPoint to_dual(const Point& x) { return {x.prefix(), x.tail()}; }
inline Point to_primal(const DualPoint& p) { return {p.prefix(), p.tail()}; }

inline double coordinate(const Point& x, std::size_t n) { return x.coordinate(n); }

/// e_n: 1 at index n, 0 elsewhere.
inline Point basis_vector(std::size_t n) {
    if (n == 0) throw InvalidArgument("basis vectors are 1-based");
    std::vector<double> prefix(n, 0.0);
    prefix[n - 1] = 1.0;
    return Point(std::move(prefix));
}

/// e_n^*: the n-th coordinate functional.
inline DualPoint coordinate_functional(std::size_t n) { return to_dual(basis_vector(n)); }

/// If h is some basis vector e_n, returns n.
template <class Tag>
std::optional<std::size_t> basis_index(const Sequence<Tag>& h) {
    if (!h.has_zero_tail()) return std::nullopt;
    std::optional<std::size_t> idx;
    for (std::size_t i = 0; i < h.prefix().size(); ++i) {
        const double v = h.prefix()[i];
        if (v == 0.0) continue;
        if (v != 1.0 || idx) return std::nullopt;
        idx = i + 1;
    }
    return idx;
}

/// anchor + P^k(x - anchor): coordinates 1..k from x, the rest from anchor.
inline Point project(const Point& x, std::size_t k, const Point& anchor) {
    const std::size_t m = std::max(k, anchor.prefix().size());
    std::vector<double> prefix(m);
    for (std::size_t n = 1; n <= m; ++n) prefix[n - 1] = n <= k ? x.coordinate(n) : anchor.coordinate(n);
    return {std::move(prefix), anchor.tail()};
}

/// P^k(x).
inline Point project(const Point& x, std::size_t k) { return project(x, k, Point::zero()); }

/// anchor with its first y.size() coordinates replaced by y.
inline Point embed(const std::vector<double>& y, const Point& anchor) {
    return project(Point(y), y.size(), anchor);
}

/// <p, x> as a certified series.
inline SeriesValue pair(const DualPoint& p, const Point& x, double tol = kDefaultSeriesTol) {
    const std::size_t m = std::max(p.prefix().size(), x.prefix().size());
    CompensatedSum head;
    for (std::size_t n = 1; n <= m; ++n) head.add(p.coordinate(n) * x.coordinate(n));
    const auto tail = try_sum_closed_form(p.tail_form() * x.tail_form(), m + 1, tol);
    if (!tail) throw NonConvergentPairing("pairing series is not absolutely convergent for these tails");
    return SeriesValue{head.value(), head.rounding_bound(), head.count()} + *tail;
}

/// Frechet metric of R^N: sum 2^-i |x_i - y_i| / (1 + |x_i - y_i|).
inline SeriesValue metric_rn(const Point& x, const Point& y, double tol = kDefaultSeriesTol) {
    auto term = [&](std::size_t i) {
        const double d = std::abs(x.coordinate(i) - y.coordinate(i));
        return std::ldexp(d / (1.0 + d), -static_cast<int>(std::min<std::size_t>(i, 2000)));
    };
    return certified_series(term, {1, 1.0, 0.5}, tol);
}

/// Largest |q| over the tail terms c q^n n^e; 0 for a zero tail.
inline double tail_decay_ratio(const Point& x) {
    double q = 0.0;
    const ClosedForm tail = x.tail_form();
    for (const auto& m : tail.terms()) q = std::max(q, std::abs(m.base));
    return q;
}

/// Sum of |x_n| is finite.
inline bool in_ell1(const Point& x) {
    const ClosedForm tail = x.tail_form();
    for (const auto& m : tail.terms()) {
        const double q = std::abs(m.base);
        if (q > 1.0 && !detail::nearly_equal(q, 1.0)) return false;
        if (detail::nearly_equal(q, 1.0) && !(m.exponent < -1.0)) return false;
    }
    return true;
}

/// sup |x_n| is finite.
inline bool in_ellinf(const Point& x) { return tail_majorant(x.tail_form(), x.tail_start()).has_value(); }

/// Bound on sup_n |x_n|; +inf outside l-infinity.
inline double sup_bound(const Point& x) {
    double s = 0.0;
    for (double v : x.prefix()) s = std::max(s, std::abs(v));
    const auto maj = tail_majorant(x.tail_form(), x.tail_start());
    if (!maj) return std::numeric_limits<double>::infinity();
    return std::max(s, maj->at(x.tail_start()));
}

/// ||x||_1, +inf when x is not in l1.
inline SeriesValue norm_l1(const Point& x, double tol = kDefaultSeriesTol) {
    if (!in_ell1(x)) return SeriesValue::infinity();
    const auto maj = tail_majorant(x.tail_form(), x.tail_start());
    if (!maj || !maj->decays_geometrically())
        throw NoMajorant("norm_l1: tail has no geometric majorant");
    return certified_series([&](std::size_t n) { return std::abs(x.coordinate(n)); },
                            {x.tail_start(), maj->geometric, maj->ratio}, tol);
}

enum class SpaceKind { RN, Ell1, EllInf };

inline const char* to_string(SpaceKind k) {
    switch (k) {
    case SpaceKind::RN: return "rn";
    case SpaceKind::Ell1: return "ell1";
    case SpaceKind::EllInf: return "ellinf";
    }
    return "?";
}

/// Which sequence space we work in and what its canonical basis provides.
struct SpaceDescriptor {
    SpaceKind kind = SpaceKind::EllInf;
    bool basis_is_topological = false;
    std::optional<double> basis_constant;

    static SpaceDescriptor rn() { return {SpaceKind::RN, true, std::nullopt}; }
    static SpaceDescriptor ell1() { return {SpaceKind::Ell1, true, 1.0}; }
    static SpaceDescriptor ellinf() { return {SpaceKind::EllInf, false, std::nullopt}; }

    static SpaceDescriptor of(SpaceKind k) {
        switch (k) {
        case SpaceKind::RN: return rn();
        case SpaceKind::Ell1: return ell1();
        case SpaceKind::EllInf: return ellinf();
        }
        return ellinf();
    }

    bool contains(const Point& x) const {
        switch (kind) {
        case SpaceKind::RN: return true;
        case SpaceKind::Ell1: return in_ell1(x);
        case SpaceKind::EllInf: return in_ellinf(x);
        }
        return false;
    }

    friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;
};

} // namespace seqcert
