#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// binary. Each check draws its cases from a seeded generator and reports
// the first counterexample.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "seqcert/certify.hpp"
#include "seqcert/derivative.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/random.hpp"
#include "seqcert/reduce.hpp"
#include "seqcert/seqspace.hpp"

namespace seqcert::testing {

struct PropertyResult {
    std::string name;
    bool ok = true;
    std::size_t cases = 0;
    std::string detail;
};

inline std::string describe(const Point& x) { return to_json(x).dump(); }
inline std::string describe(const FunctionExpr& f) { return to_json(f).dump(); }

/// Random grammar functions; `smooth` leaves out |.| so derivatives exist everywhere.
class FunctionSampler {
public:
    explicit FunctionSampler(std::uint64_t seed) : s_(seed) {}

    PointSampler& points() { return s_; }

    TailRule coefficient_rule() {
        switch (s_.index(0, 3)) {
        case 0: return TailRule::constant(s_.uniform(-2.0, 2.0));
        case 1: return TailRule::harmonic(s_.uniform(-2.0, 2.0));
        case 2: return TailRule::geometric(s_.uniform(-2.0, 2.0), s_.uniform(-0.8, 0.8));
        default: return TailRule::zero();
        }
    }

    ScalarConvex inner(bool smooth) {
        switch (s_.index(smooth ? 1 : 0, 3)) {
        case 0: return ScalarConvex::abs();
        case 1: return ScalarConvex::square();
        case 2: return ScalarConvex::affine_quad(s_.uniform(0.0, 2.0), coefficient_rule());
        default: return ScalarConvex::linear(coefficient_rule());
        }
    }

    FunctionExpr leaf(SpaceKind space, bool smooth) {
        const std::size_t pick = s_.index(space == SpaceKind::EllInf && !smooth ? 0 : 1, 3);
        switch (pick) {
        case 0: return limsup_seminorm();
        case 1:
        case 2:
            return separable(TailRule::geometric(s_.uniform(0.2, 2.0), s_.uniform(0.2, 0.8)), inner(smooth));
        default: {
            std::vector<double> prefix(s_.index(0, 3));
            for (auto& v : prefix) v = s_.uniform(-2.0, 2.0);
            return affine(DualPoint(prefix, TailRule::geometric(s_.uniform(-1.0, 1.0), s_.uniform(0.1, 0.7))),
                          s_.uniform(-1.0, 1.0));
        }
        }
    }

    FunctionExpr function(SpaceKind space, bool smooth = false) {
        const std::size_t count = s_.index(1, 3);
        std::vector<FunctionExpr> terms;
        for (std::size_t i = 0; i < count; ++i) {
            FunctionExpr t = leaf(space, smooth);
            if (s_.index(0, 3) == 0) t = scale(s_.uniform(0.1, 3.0), t);
            terms.push_back(t);
        }
        return count == 1 ? terms.front() : combine_sum(terms);
    }

private:
    PointSampler s_;
};

/// The derivative as a dual sequence when its tail is expressible in the rule grammar.
inline std::optional<DualPoint> as_dual_point(const GateauxDerivative& d) {
    if (!d.tail) return std::nullopt;
    std::vector<TailRule> rules;
    for (const auto& m : d.tail->terms()) {
        if (m.exponent == 0.0 && m.base == 1.0) rules.push_back(TailRule::constant(m.coef));
        else if (m.exponent == 0.0 && std::abs(m.base) < 1.0) rules.push_back(TailRule::geometric(m.coef, m.base));
        else if (m.exponent == -1.0 && m.base == 1.0) rules.push_back(TailRule::harmonic(m.coef));
        else return std::nullopt;
    }
    return DualPoint(d.head, rules);
}

namespace detail {

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

} // namespace detail

// ---- sequence spaces ----

inline PropertyResult biorthogonality() {
    PropertyResult r{"biorthogonality"};
    for (std::size_t n = 1; n <= 64; ++n) {
        for (std::size_t k = 1; k <= 64; ++k) {
            ++r.cases;
            const double v = pair(coordinate_functional(n), basis_vector(k)).value;
            if (v != (n == k ? 1.0 : 0.0)) {
                r.ok = false;
                r.detail = "<e_" + std::to_string(n) + "*, e_" + std::to_string(k) + "> = " + std::to_string(v);
                return r;
            }
        }
    }
    return r;
}

inline PropertyResult projection_idempotence_nesting(std::uint64_t seed) {
    PropertyResult r{"projection idempotence and nesting"};
    PointSampler s(seed);
    for (int i = 0; i < 200; ++i) {
        const Point x = s.point(SpaceKind::EllInf), a = s.point(SpaceKind::EllInf);
        const std::size_t k = s.index(0, 12), j = s.index(0, 12);
        const Point p = project(x, k, a);
        ++r.cases;
        bool ok = project(p, k, a) == p;
        const Point nested = project(p, j, a), direct = project(x, std::min(j, k), a);
        for (std::size_t n = 1; n <= 40 && ok; ++n) ok = nested.coordinate(n) == direct.coordinate(n);
        if (!ok) {
            r.ok = false;
            r.detail = "x=" + describe(x) + " a=" + describe(a) + " k=" + std::to_string(k) + " j=" + std::to_string(j);
            return r;
        }
    }
    return r;
}

inline PropertyResult ell1_contractivity(std::uint64_t seed) {
    PropertyResult r{"l1 projection contractivity"};
    PointSampler s(seed);
    for (int i = 0; i < 100; ++i) {
        const Point x = s.point(SpaceKind::Ell1);
        const std::size_t k = s.index(0, 10);
        ++r.cases;
        const auto px = norm_l1(project(x, k)), nx = norm_l1(x);
        if (px.value > nx.value + px.error_bound + nx.error_bound) {
            r.ok = false;
            r.detail = "x=" + describe(x) + " k=" + std::to_string(k);
            return r;
        }
    }
    return r;
}

inline PropertyResult series_error_bound(std::uint64_t seed) {
    PropertyResult r{"certified series error bound"};
    PointSampler s(seed);
    for (int i = 0; i < 50; ++i) {
        const double c = s.uniform(-2.0, 2.0), q = s.uniform(-0.9, 0.9);
        const double tol = std::pow(10.0, -s.uniform(4.0, 10.0));
        auto term = [&](std::size_t n) { return c * std::pow(q, static_cast<double>(n)) / static_cast<double>(n); };
        const auto v = certified_series(term, {1, std::abs(c), std::abs(q)}, tol);
        // Four times as many terms, summed directly.
        CompensatedSum ref;
        for (std::size_t n = 1; n <= 4 * v.terms_used + 4; ++n) ref.add(term(n));
        ++r.cases;
        if (std::abs(ref.value() - v.value) > v.error_bound + 1e-15) {
            r.ok = false;
            r.detail = "c=" + std::to_string(c) + " q=" + std::to_string(q);
            return r;
        }
    }
    return r;
}

// ---- functions ----

inline PropertyResult convexity_sampling(std::uint64_t seed) {
    PropertyResult r{"convexity sampling"};
    FunctionSampler fs(seed);
    for (int i = 0; i < 60; ++i) {
        const auto f = fs.function(SpaceKind::EllInf);
        const Point x = fs.points().point(SpaceKind::EllInf), y = fs.points().point(SpaceKind::EllInf);
        const auto fx = evaluate(f, x), fy = evaluate(f, y);
        for (double l : {0.25, 0.5, 0.75}) {
            ++r.cases;
            const auto fm = evaluate(f, l * x + (1.0 - l) * y);
            const double slack = 2.0 * (fm.error_bound + fx.error_bound + fy.error_bound) + 1e-12 * (1 + std::abs(fm.value));
            if (fm.value > l * fx.value + (1.0 - l) * fy.value + slack) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " x=" + describe(x) + " y=" + describe(y);
                return r;
            }
        }
    }
    return r;
}

// ---- directional derivatives ----

inline PropertyResult quotient_monotonicity(std::uint64_t seed) {
    PropertyResult r{"quotient monotonicity"};
    FunctionSampler fs(seed);
    DerivOptions o;
    o.prefer_analytic = false;
    for (int i = 0; i < 40; ++i) {
        const auto f = fs.function(SpaceKind::EllInf);
        const Point x = fs.points().point(SpaceKind::EllInf);
        const Point h = i % 2 ? fs.points().direction() : basis_vector(fs.points().index(1, 6));
        ++r.cases;
        DirDerivResult d;
        try {
            d = dir_deriv(f, x, h, o);
        } catch (const NonConvexBehavior& e) {
            r.ok = false;
            r.detail = std::string(e.what()) + " f=" + describe(f) + " x=" + describe(x);
            return r;
        }
        // Right quotients (t > 0) must not increase as t decreases.
        double prev = std::numeric_limits<double>::infinity();
        const double f0 = std::abs(evaluate(f, x).value) + 1.0;
        for (const auto& q : d.quotients_log) {
            if (q.t <= 0) continue;
            const double nz = 10.0 * (o.noise_scale * std::numeric_limits<double>::epsilon() * f0 / q.t + 1e-12 / q.t);
            if (q.quotient > prev + nz) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " x=" + describe(x);
                return r;
            }
            prev = q.quotient;
        }
    }
    return r;
}

inline PropertyResult left_le_right(std::uint64_t seed) {
    PropertyResult r{"left derivative <= right derivative"};
    FunctionSampler fs(seed);
    DerivOptions o;
    o.prefer_analytic = false;
    for (int i = 0; i < 40; ++i) {
        const auto f = fs.function(SpaceKind::EllInf);
        const Point x = fs.points().point(SpaceKind::EllInf);
        const Point h = i % 2 ? fs.points().direction() : basis_vector(fs.points().index(1, 6));
        const auto d = dir_deriv(f, x, h, o);
        ++r.cases;
        if (d.left > d.right + std::max(d.noise_floor, 1e-9)) {
            r.ok = false;
            r.detail = "f=" + describe(f) + " x=" + describe(x);
            return r;
        }
    }
    return r;
}

/// Closed-form derivatives along e_n against the numeric estimator (100 triples).
inline PropertyResult analytic_numeric_agreement(std::uint64_t seed) {
    PropertyResult r{"analytic vs numeric derivatives"};
    FunctionSampler fs(seed);
    DerivOptions num;
    num.prefer_analytic = false;
    while (r.cases < 100) {
        const auto f = fs.function(SpaceKind::EllInf);
        const Point x = fs.points().point(SpaceKind::EllInf);
        const std::size_t n = fs.points().index(1, 8);
        // Finite differences cannot separate a coordinate this close to a kink from the kink.
        const double xn = std::abs(x.coordinate(n));
        if (xn > 0.0 && xn < 1e-6) continue;
        const auto a = analytic_dir_deriv(f, x, n);
        const auto d = dir_deriv(f, x, basis_vector(n), num);
        ++r.cases;
        bool ok = a.exists() == d.exists;
        const double tol = std::max(1e-8, d.noise_floor);
        if (ok && a.exists()) ok = detail::close(a.value(), d.value, tol);
        if (ok && !a.exists()) ok = detail::close(a.left, d.left, 1e-6) && detail::close(a.right, d.right, 1e-6);
        if (!ok) {
            std::ostringstream os;
            os << "f=" << describe(f) << " x=" << describe(x) << " n=" << n << " analytic=[" << a.left << ","
               << a.right << "] numeric=[" << d.left << "," << d.right << "] value " << d.value;
            r.ok = false;
            r.detail = os.str();
            return r;
        }
    }
    return r;
}

inline PropertyResult positive_homogeneity(std::uint64_t seed) {
    PropertyResult r{"positive homogeneity in the direction"};
    FunctionSampler fs(seed);
    DerivOptions o;
    o.prefer_analytic = false;
    for (int i = 0; i < 30; ++i) {
        const auto f = fs.function(SpaceKind::EllInf, true);
        const Point x = fs.points().point(SpaceKind::EllInf);
        const Point h = fs.points().direction();
        const auto d1 = dir_deriv(f, x, h, o), d2 = dir_deriv(f, x, 2.0 * h, o);
        ++r.cases;
        if (d1.exists && d2.exists && !detail::close(d2.value, 2.0 * d1.value, 1e-6 * (1 + std::abs(d1.value)))) {
            r.ok = false;
            r.detail = "f=" + describe(f) + " x=" + describe(x) + " h=" + describe(h);
            return r;
        }
    }
    return r;
}

// ---- reductions ----

inline PropertyResult reduced_gradient_matches(std::uint64_t seed) {
    PropertyResult r{"reduced gradient equals basis derivatives"};
    FunctionSampler fs(seed);
    for (int i = 0; i < 30; ++i) {
        const auto f = fs.function(SpaceKind::EllInf, true);
        const Point x = fs.points().point(SpaceKind::EllInf);
        const std::size_t k = fs.points().index(1, 5);
        const auto rp = build_reduced(f, SetDescriptor::whole_space(), x, k);
        DerivOptions num;
        num.prefer_analytic = false;
        const auto g = grad_reduced(rp, rp.anchor_coordinates(), num);
        const auto prof = dir_deriv_profile(f, x, k);
        ++r.cases;
        for (std::size_t n = 0; n < k; ++n) {
            if (!detail::close(g[n], prof[n].value, 1e-8)) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " x=" + describe(x) + " n=" + std::to_string(n + 1);
                return r;
            }
        }
    }
    return r;
}

// ---- certificates ----

/// check_psc(f) and check_psc(g) holding implies check_psc(f + g) on the same probes.
inline PropertyResult psc_sum_rule(std::uint64_t seed) {
    PropertyResult r{"pseudo-semicontinuity sum rule"};
    FunctionSampler fs(seed);
    CertifyOptions o;
    o.force_numeric = true;
    o.psc_depth = 16;
    o.random_probes = 4;
    for (int i = 0; i < 400 && r.cases < 20; ++i) {
        const auto f = fs.function(SpaceKind::EllInf), g = fs.function(SpaceKind::EllInf);
        const Point x = fs.points().point(SpaceKind::EllInf);
        o.seed = seed + static_cast<std::uint64_t>(i);
        const auto probes = probe_set(SetDescriptor::whole_space(), x, o);
        const auto cf = check_psc(f, SetDescriptor::whole_space(), x, probes, o.psc_depth, o);
        const auto cg = check_psc(g, SetDescriptor::whole_space(), x, probes, o.psc_depth, o);
        if (!cf.holds() || !cg.holds()) continue;
        ++r.cases;
        const auto cs = check_psc(combine_sum({f, g}), SetDescriptor::whole_space(), x, probes, o.psc_depth, o);
        if (!cs.holds()) {
            r.ok = false;
            r.detail = "f=" + describe(f) + " g=" + describe(g) + " x=" + describe(x);
            return r;
        }
    }
    if (r.cases < 20) {
        r.ok = false;
        r.detail = "only " + std::to_string(r.cases) + " pairs with both summands holding";
    }
    return r;
}

/// When subgradient_test holds, f(y) >= f(x) + <p, y - x> - tol on 50 random y.
inline PropertyResult subgradient_inequality(std::uint64_t seed) {
    PropertyResult r{"subgradient inequality sampling"};
    FunctionSampler fs(seed);
    CertifyOptions o;
    o.space = SpaceDescriptor::ell1();
    std::size_t certified = 0;
    for (int i = 0; i < 40 && certified < 8; ++i) {
        const auto f = fs.function(SpaceKind::Ell1, true);
        const Point x = fs.points().point(SpaceKind::Ell1);
        const auto g = gateaux_detect(f, x, o);
        if (!g.certificate.holds() || !g.derivative) continue;
        const auto candidate = as_dual_point(*g.derivative);
        if (!candidate) continue;
        const DualPoint& p = *candidate;
        const auto c = subgradient_test(f, x, p, o);
        if (!c.holds()) continue;
        ++certified;
        const double fx = evaluate(f, x).value;
        for (int j = 0; j < 50; ++j) {
            const Point y = fs.points().point(SpaceKind::Ell1);
            ++r.cases;
            const double lhs = evaluate(f, y).value;
            const double rhs = fx + pair(p, y - x).value - 1e-7;
            if (lhs < rhs) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " x=" + describe(x) + " y=" + describe(y);
                return r;
            }
        }
    }
    if (certified == 0) {
        r.ok = false;
        r.detail = "no subgradient certificate was produced";
    }
    return r;
}

/// apply(a h1 + h2) = a apply(h1) + apply(h2), and apply(h) matches dir_deriv along h.
inline PropertyResult gateaux_linearity(std::uint64_t seed) {
    PropertyResult r{"Gateaux derivative linearity and consistency"};
    FunctionSampler fs(seed);
    CertifyOptions o;
    o.space = SpaceDescriptor::ell1();
    DerivOptions num;
    num.prefer_analytic = false;
    std::size_t certified = 0;
    for (int i = 0; i < 60 && certified < 10; ++i) {
        const auto f = fs.function(SpaceKind::Ell1);
        const Point x = fs.points().nonzero_point(SpaceKind::Ell1);
        const auto res = gateaux_detect(f, x, o);
        if (!res.certificate.holds() || !res.derivative || !res.derivative->analytic()) continue;
        ++certified;
        const auto& d = *res.derivative;
        for (int j = 0; j < 5; ++j) {
            const Point h1 = fs.points().direction_subordinate_to(x), h2 = fs.points().direction_subordinate_to(x);
            const double a = fs.points().uniform(-2.0, 2.0);
            ++r.cases;
            const double lhs = d.apply(a * h1 + h2).value;
            const double rhs = a * d.apply(h1).value + d.apply(h2).value;
            const auto direct = dir_deriv(f, x, h1, num);
            if (!detail::close(lhs, rhs, 1e-9 * (1 + std::abs(lhs))) || !direct.exists ||
                !detail::close(d.apply(h1).value, direct.value, 1e-6)) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " x=" + describe(x) + " h1=" + describe(h1);
                return r;
            }
        }
    }
    if (certified == 0) {
        r.ok = false;
        r.detail = "no Gateaux certificate was produced";
    }
    return r;
}

/// When kkt_certify holds, f(x*) <= f(x) + tol on 50 random feasible points.
inline PropertyResult kkt_dominance(std::uint64_t seed) {
    PropertyResult r{"KKT dominance over feasible points"};
    PointSampler s(seed);
    for (int i = 0; i < 5; ++i) {
        // min sum beta^n x_n^2 subject to c - x_1 <= 0, solved by x* = c e_1 with lambda = 2 beta c.
        const double beta = s.uniform(0.2, 0.6), c = s.uniform(0.5, 2.0);
        const auto f = separable(TailRule::geometric(1.0, beta), ScalarConvex::square());
        const KktProblem prob{f, {affine(DualPoint({-1.0}), c)}, {}, SetDescriptor::whole_space()};
        const Point x = c * basis_vector(1);
        const auto cert = kkt_certify(prob, x, {2.0 * beta * c}, {});
        if (!cert.holds()) {
            r.ok = false;
            r.detail = "certificate " + std::string(to_string(cert.verdict)) + ": " + cert.reason;
            return r;
        }
        const double fx = evaluate(f, x).value;
        for (int j = 0; j < 50; ++j) {
            Point y = s.point(SpaceKind::EllInf);
            if (y.coordinate(1) < c) y = y + (c - y.coordinate(1) + s.uniform(0.0, 1.0)) * basis_vector(1);
            ++r.cases;
            if (fx > evaluate(f, y).value + 1e-7) {
                r.ok = false;
                r.detail = "y=" + describe(y);
                return r;
            }
        }
    }
    return r;
}

/// Whenever certify_min holds, the reduced oracles reach f(x*) for k in {1, 2, 4, 8}.
inline PropertyResult oracle_agreement(std::uint64_t seed) {
    PropertyResult r{"oracle agreement with certified minima"};
    FunctionSampler fs(seed);
    std::size_t certified = 0;
    for (int i = 0; i < 40 && certified < 6; ++i) {
        // Strictly convex separable objective with its minimizer as the point.
        const double w = fs.points().uniform(0.3, 2.0), q = fs.points().uniform(0.2, 0.7);
        const TailRule b = fs.coefficient_rule();
        const auto f = separable(TailRule::geometric(w, q), ScalarConvex::affine_quad(1.0, b));
        const Point x({}, TailRule{b.kind, -0.5 * b.c, b.r});
        const auto c = certify_min(f, SetDescriptor::whole_space(), x);
        if (!c.holds()) continue;
        ++certified;
        const double fx = evaluate(f, x).value;
        for (std::size_t k : {1, 2, 4, 8}) {
            ++r.cases;
            const auto m = minimize_reduced(build_reduced(f, SetDescriptor::whole_space(), x, k));
            if (!detail::close(m.value, fx, 1e-6)) {
                r.ok = false;
                r.detail = "f=" + describe(f) + " k=" + std::to_string(k);
                return r;
            }
        }
    }
    if (certified == 0) {
        r.ok = false;
        r.detail = "no minimality certificate was produced";
    }
    return r;
}

inline std::vector<PropertyResult> all_properties(std::uint64_t seed = 42) {
    return {biorthogonality(),
            projection_idempotence_nesting(seed),
            ell1_contractivity(seed),
            series_error_bound(seed),
            convexity_sampling(seed),
            quotient_monotonicity(seed),
            left_le_right(seed),
            analytic_numeric_agreement(seed),
            positive_homogeneity(seed),
            reduced_gradient_matches(seed),
            psc_sum_rule(seed),
            subgradient_inequality(seed),
            gateaux_linearity(seed),
            kkt_dominance(seed),
            oracle_agreement(seed)};
}

} // namespace seqcert::testing
