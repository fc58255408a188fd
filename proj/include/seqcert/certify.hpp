#pragma once

// Certificates for optimality, subgradients, Gateaux differentiability,
// term-wise differentiation of series and KKT multipliers, built from
// directional derivatives along the canonical basis.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqcert/closed_form.hpp"
#include "seqcert/derivative.hpp"
#include "seqcert/error.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/random.hpp"
#include "seqcert/seqspace.hpp"
#include "seqcert/serialize.hpp"
#include "seqcert/sets.hpp"

namespace seqcert {

enum class Verdict { Holds, Fails, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Fails: return "FAILS";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

/// Whether a "for all n" claim was settled symbolically or on the first n coordinates.
struct Grade {
    bool analytic = true;
    std::size_t n = 0;

    static Grade analytic_all_n() { return {true, 0}; }
    static Grade numeric_first_n(std::size_t n) { return {false, n}; }

    std::string to_string() const {
        return analytic ? "ANALYTIC_ALL_N" : "NUMERIC_FIRST_N(" + std::to_string(n) + ")";
    }

    /// The weaker of two grades.
    friend Grade weakest(const Grade& a, const Grade& b) {
        if (a.analytic) return b;
        if (b.analytic) return a;
        return {false, std::min(a.n, b.n)};
    }

    friend bool operator==(const Grade&, const Grade&) = default;
};

struct CoordinateRecord {
    std::size_t n = 0;
    double left = 0.0;
    double right = 0.0;
    bool exists = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    DerivMethod method = DerivMethod::Analytic;
};

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    Grade grade;
    std::string reason;
    json witness = json::object();
    json evidence = json::object();
    std::vector<CoordinateRecord> coordinates;

    bool holds() const { return verdict == Verdict::Holds; }
    bool fails() const { return verdict == Verdict::Fails; }
};

/// Finite numbers as JSON numbers, the rest as "inf" / "-inf" / "nan".
inline json number_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline json to_json(const CoordinateRecord& r) {
    return {{"n", r.n},
            {"left", number_json(r.left)},
            {"right", number_json(r.right)},
            {"exists", r.exists},
            {"value", number_json(r.value)},
            {"method", to_string(r.method)}};
}

inline json to_json(const Certificate& c) {
    json out = {{"verdict", to_string(c.verdict)}, {"grade", c.grade.to_string()}};
    if (!c.reason.empty()) out["reason"] = c.reason;
    out["witness"] = c.witness;
    json ev = c.evidence;
    if (!c.coordinates.empty()) {
        json coords = json::array();
        for (const auto& r : c.coordinates) coords.push_back(to_json(r));
        ev["coordinates"] = coords;
    }
    out["evidence"] = ev;
    return out;
}

struct CertifyOptions {
    SpaceDescriptor space = SpaceDescriptor::ellinf();
    std::size_t coords = 64;     // N
    double tol = 1e-7;
    std::size_t psc_depth = 64;  // K
    std::vector<Point> probes;   // empty selects the default probe set
    std::size_t random_probes = 10;
    std::uint64_t seed = 42;
    DerivOptions deriv;
    bool force_numeric = false;  // skip closed forms and symbolic rules
    double series_tol = 1e-12;
};

struct LabeledPoint {
    std::string label;
    Point point;
};

/// Zero, x*, x*/2, x* moved along e_1, and seeded random points of X.
inline std::vector<LabeledPoint> default_probes(const SetDescriptor& set, const Point& x, const CertifyOptions& opts) {
    std::vector<LabeledPoint> out;
    auto add = [&](std::string label, Point p) {
        if (set.contains(p).value_or(false)) out.push_back({std::move(label), std::move(p)});
    };
    add("zero", Point::zero());
    add("point", x);
    add("half", 0.5 * x);
    const Point e1 = basis_vector(1);
    if (set.contains(x + 0.5 * e1).value_or(false)) add("perturbed", x + 0.5 * e1);
    else add("perturbed", x - 0.5 * e1);
    PointSampler sampler(opts.seed);
    for (std::size_t i = 0, tries = 0; i < opts.random_probes && tries < 20 * opts.random_probes; ++tries) {
        Point p = sampler.point(opts.space.kind, set);
        if (!set.contains(p).value_or(false)) continue;
        out.push_back({"random_" + std::to_string(i), std::move(p)});
        ++i;
    }
    return out;
}

inline std::vector<LabeledPoint> probe_set(const SetDescriptor& set, const Point& x, const CertifyOptions& opts) {
    if (opts.probes.empty()) return default_probes(set, x, opts);
    std::vector<LabeledPoint> out;
    for (std::size_t i = 0; i < opts.probes.size(); ++i) out.push_back({"probe_" + std::to_string(i), opts.probes[i]});
    return out;
}

// ---- per-coordinate derivative checks ----

/// coef * f; coefficients may be negative (equality multipliers).
struct WeightedTerm {
    double coef = 1.0;
    FunctionExpr f;
};

/// Outcome of comparing f'(x; e_n) with target_n over the coordinates.
struct CoordinateCheck {
    std::vector<CoordinateRecord> records;     // n <= N
    bool symbolic = false;                     // derivative == target decided for every n
    std::optional<CoordinateRecord> mismatch;  // first n with target_n outside [left, right] (beyond tol)
    std::optional<CoordinateRecord> nonexistent;
    std::size_t from = 0;                      // closed forms below govern n >= from
    std::optional<ClosedForm> tail_left, tail_right;

    bool all_match() const { return !mismatch && !nonexistent; }
};

namespace detail {

inline OneSided scaled(double c, OneSided d) {
    if (c == 0.0) return {0.0, 0.0};
    if (c > 0.0) return {c * d.left, c * d.right};
    return {c * d.right, c * d.left};
}

inline CoordinateRecord analytic_record(const std::vector<WeightedTerm>& terms, const Point& x, std::size_t n) {
    OneSided acc{0.0, 0.0};
    for (const auto& t : terms) {
        const auto d = scaled(t.coef, one_sided_derivative(t.f, x, n));
        acc.left += d.left;
        acc.right += d.right;
    }
    CoordinateRecord r{n, acc.left, acc.right, acc.differentiable(), std::numeric_limits<double>::quiet_NaN(),
                       DerivMethod::Analytic};
    if (r.exists) r.value = r.right;
    return r;
}

inline CoordinateRecord numeric_record(const std::vector<WeightedTerm>& terms, const Point& x, std::size_t n,
                                       DerivOptions opts) {
    opts.prefer_analytic = false;
    CoordinateRecord r{n, 0.0, 0.0, true, 0.0, DerivMethod::Numeric};
    const Point h = basis_vector(n);
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        DirDerivResult d;
        try {
            d = dir_deriv(t.f, x, h, opts);
        } catch (const DomainLimited&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return {n, nan, nan, false, nan, DerivMethod::Numeric};
        }
        const auto s = scaled(t.coef, {d.left, d.right});
        r.left += s.left;
        r.right += s.right;
        r.exists = r.exists && d.exists;
        r.value += t.coef * d.value;
    }
    if (!r.exists) r.value = std::numeric_limits<double>::quiet_NaN();
    return r;
}

inline bool outside(const CoordinateRecord& r, double target, double tol) {
    return r.right < target - tol || r.left > target + tol;
}

inline std::optional<TailDerivative> combined_tail(const std::vector<WeightedTerm>& terms, const Point& x,
                                                   std::size_t from) {
    TailDerivative acc{from, {}, {}, false};
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        const auto d = tail_derivative_at(t.f, x, from);
        if (!d) return std::nullopt;
        const ClosedForm& lo = t.coef > 0.0 ? d->left : d->right;
        const ClosedForm& hi = t.coef > 0.0 ? d->right : d->left;
        acc.left = acc.left + t.coef * lo;
        acc.right = acc.right + t.coef * hi;
        acc.infinite = acc.infinite || d->infinite;
    }
    return acc;
}

inline constexpr std::size_t kMaxExplicitCoordinates = 1'000'000;
inline constexpr std::size_t kWitnessScan = 100'000;

} // namespace detail

/// Compares sum_i coef_i f_i'(x; e_n) with target_n for n <= N, and for all n
/// when the closed forms of the terms settle the tail.
inline CoordinateCheck check_coordinates(const std::vector<WeightedTerm>& terms, const Point& x,
                                         const DualPoint& target, const CertifyOptions& opts) {
    CoordinateCheck out;
    const double tol = opts.tol;
    auto note = [&](const CoordinateRecord& r) {
        const double tn = target.coordinate(r.n);
        if (!out.mismatch && detail::outside(r, tn, tol)) out.mismatch = r;
        if (!out.nonexistent && !r.exists) out.nonexistent = r;
    };
    for (std::size_t n = 1; n <= opts.coords; ++n) {
        auto r = opts.force_numeric ? detail::numeric_record(terms, x, n, opts.deriv)
                                    : detail::analytic_record(terms, x, n);
        note(r);
        out.records.push_back(r);
    }
    if (opts.force_numeric) return out;

    std::size_t from = std::max(target.tail_start(), x.tail_start());
    for (const auto& t : terms) from = std::max(from, detail::closed_form_start(t.f, x));
    from = std::max<std::size_t>(from, 1);
    if (from > detail::kMaxExplicitCoordinates) return out;
    const auto td = detail::combined_tail(terms, x, from);
    if (!td) return out;
    out.from = from;
    out.tail_left = td->left;
    out.tail_right = td->right;

    for (std::size_t n = opts.coords + 1; n < from; ++n) note(detail::analytic_record(terms, x, n));
    const ClosedForm tgt = target.tail_form();
    const ClosedForm dl = td->left - tgt, dr = td->right - tgt;
    if (!td->infinite && dl.is_zero() && dr.is_zero()) {
        out.symbolic = true;
        return out;
    }
    // Look for the first tail coordinate that breaks the condition; values come
    // from the closed forms so tiny coordinates cannot fake a kink.
    const bool kinked = td->infinite || !(td->right - td->left).is_zero();
    const std::size_t start = std::max(from, opts.coords + 1);
    for (std::size_t n = start; n < start + detail::kWitnessScan; ++n) {
        if (out.mismatch && (out.nonexistent || !kinked)) break;
        if (td->infinite) {
            note(detail::analytic_record(terms, x, n));
            break;
        }
        const double l = td->left(n), r = td->right(n);
        CoordinateRecord rec{n, l, r, l == r, l == r ? r : std::numeric_limits<double>::quiet_NaN(),
                             DerivMethod::Analytic};
        note(rec);
    }
    return out;
}

// ---- qualification ----

namespace detail {

// First n with d_n <= 0, or 0 if every coordinate is positive; nullopt if undecided.
inline std::optional<std::size_t> first_nonpositive(const Point& d, std::size_t scan) {
    for (std::size_t n = 1; n < d.tail_start(); ++n)
        if (!(d.coordinate(n) > 0.0)) return n;
    const auto sg = strict_sign(d.tail_form(), d.tail_start());
    if (sg && *sg > 0) return 0;
    if (sg) return d.tail_start();
    for (std::size_t n = d.tail_start(); n < d.tail_start() + scan; ++n)
        if (!(d.coordinate(n) > 0.0)) return n;
    return std::nullopt;
}

} // namespace detail

/// X is qualified at x: P^k(x) interior to X^k for all k, and X stable under P^k-moves toward x.
inline Certificate check_qualification(const SetDescriptor& set, const Point& x, std::size_t coords) {
    Certificate c;
    c.grade = Grade::analytic_all_n();
    c.evidence["set"] = to_json(set);
    const auto member = set.contains(x);
    if (member && !*member) {
        c.reason = "point is not in the feasible set";
        return c;
    }
    c.evidence["stable_under_projection"] = true;
    if (set.kind == SetDescriptor::Kind::WholeSpace) {
        c.verdict = Verdict::Holds;
        c.reason = "whole space";
        return c;
    }
    std::vector<Point> margins;
    if (set.kind == SetDescriptor::Kind::PositiveConeEll1) {
        margins.push_back(x);
    } else {
        margins.push_back(x - set.lower);
        margins.push_back(set.upper - x);
    }
    bool decided = true;
    std::optional<std::size_t> witness;
    for (const auto& d : margins) {
        const auto k = detail::first_nonpositive(d, coords);
        if (!k) {
            decided = false;
            continue;
        }
        if (*k != 0 && (!witness || *k < *witness)) witness = *k;
    }
    if (witness) {
        c.verdict = Verdict::Fails;
        c.reason = "coordinate " + std::to_string(*witness) + " of the point lies on the boundary";
        c.witness = {{"k", *witness}, {"condition", "interior"}, {"coordinate", x.coordinate(*witness)}};
        return c;
    }
    c.verdict = Verdict::Holds;
    c.reason = "every coordinate is strictly inside its bounds";
    if (!decided) c.grade = Grade::numeric_first_n(coords);
    return c;
}

// ---- pseudo-semicontinuity ----

namespace detail {

// max over k in [K/2, K] of f(x* + P^k(x - x*)).
inline double projected_sup(const FunctionExpr& f, const Point& anchor, const Point& x, std::size_t depth,
                            double series_tol) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = std::max<std::size_t>(depth / 2, 1); k <= depth; ++k)
        best = std::max(best, evaluate(f, project(x, k, anchor), series_tol).value);
    return best;
}

} // namespace detail

/// limsup_k f(x* + P^k(x - x*)) <= f(x) for x in X.
inline Certificate check_psc(const FunctionExpr& f, const SetDescriptor& set, const Point& x,
                             const std::vector<LabeledPoint>& probes, std::size_t depth, const CertifyOptions& opts) {
    Certificate c;
    const double slack = opts.tol * static_cast<double>(detail::count_leaves(f));
    json log = json::array();

    if (!opts.force_numeric) {
        if (opts.space.basis_is_topological && continuous_on(f, opts.space)) {
            c.verdict = Verdict::Holds;
            c.grade = Grade::analytic_all_n();
            c.reason = "f is continuous and the basis is a Schauder basis";
            return c;
        }
        bool all_ok = true;
        json summands_log = json::array();
        for (const auto& [lambda, g] : summands(f)) {
            if (lambda == 0.0 || !g.as<LimsupSeminorm>()) continue;
            const double px = detail::evaluate_limsup(x).value;
            json entry = {{"summand", "limsup"}, {"value_at_point", number_json(px)}};
            if (px == 0.0) {
                entry["holds"] = true;
                summands_log.push_back(entry);
                continue;
            }
            all_ok = false;
            entry["holds"] = false;
            summands_log.push_back(entry);
            if (!set.contains(Point::zero()).value_or(false)) continue;
            // The seminorm ignores finitely many coordinates, so x = 0 violates the
            // inequality for this summand; confirm it on f itself.
            const double lhs = detail::projected_sup(f, x, Point::zero(), depth, opts.series_tol);
            const double rhs = evaluate(f, Point::zero(), opts.series_tol).value;
            if (lhs > rhs + slack) {
                c.verdict = Verdict::Fails;
                c.grade = Grade::analytic_all_n();
                c.reason = "limsup summand is positive at the point and the inequality fails at x = 0";
                c.witness = {{"type", "probe"},
                             {"label", "zero"},
                             {"point", to_json(Point::zero())},
                             {"lhs", number_json(lhs)},
                             {"rhs", number_json(rhs)},
                             {"seminorm_lhs", number_json(lambda * px)},
                             {"seminorm_rhs", 0.0}};
                c.evidence["summands"] = summands_log;
                return c;
            }
        }
        c.evidence["summands"] = summands_log;
        if (all_ok) {
            c.verdict = Verdict::Holds;
            c.grade = Grade::analytic_all_n();
            c.reason = "every summand satisfies the condition";
            return c;
        }
    }

    std::size_t checked = 0;
    for (const auto& [label, p] : probes) {
        json entry = {{"label", label}};
        try {
            if (!set.contains(p).value_or(false)) {
                entry["skipped"] = "not in the feasible set";
                log.push_back(entry);
                continue;
            }
            const double rhs = evaluate(f, p, opts.series_tol).value;
            const double lhs = std::isinf(rhs) ? rhs : detail::projected_sup(f, x, p, depth, opts.series_tol);
            entry["lhs"] = number_json(lhs);
            entry["rhs"] = number_json(rhs);
            ++checked;
            log.push_back(entry);
            if (lhs > rhs + slack) {
                c.verdict = Verdict::Fails;
                c.grade = Grade::numeric_first_n(depth);
                c.reason = "inequality fails at probe " + label;
                c.witness = {{"type", "probe"}, {"label", label}, {"point", to_json(p)},
                             {"lhs", number_json(lhs)}, {"rhs", number_json(rhs)}};
                c.evidence["probes"] = log;
                return c;
            }
        } catch (const Error& e) {
            entry["error"] = e.what();
            log.push_back(entry);
        }
    }
    c.evidence["probes"] = log;
    c.grade = Grade::numeric_first_n(depth);
    if (checked == 0) {
        c.reason = "no probe could be evaluated";
        return c;
    }
    c.verdict = Verdict::Holds;
    c.reason = "inequality holds at every probe";
    return c;
}

// ---- optimality ----

namespace detail {

inline json coordinate_witness(const CoordinateRecord& r) {
    return {{"type", "coordinate"}, {"n", r.n}, {"left", number_json(r.left)}, {"right", number_json(r.right)}};
}

// Whether the record shows a feasible descent direction +-e_n at x.
inline bool feasible_descent(const CoordinateRecord& r, const SetDescriptor& set, const Point& x, double tol) {
    const auto [lo, hi] = set.coordinate_bounds(r.n);
    const double xn = x.coordinate(r.n);
    return (r.right < -tol && hi > xn) || (r.left > tol && lo < xn);
}

inline json stationarity_json(const CoordinateCheck& st) {
    json out = {{"symbolic", st.symbolic}};
    if (st.tail_right) {
        out["tail_from"] = st.from;
        out["tail_right"] = st.tail_right->to_string();
        out["tail_left"] = st.tail_left->to_string();
    }
    return out;
}

} // namespace detail

/// Global minimality of x over X.
inline Certificate certify_min(const FunctionExpr& f, const SetDescriptor& set, const Point& x,
                               const CertifyOptions& opts = {}) {
    Certificate c;
    c.grade = Grade::numeric_first_n(opts.coords);
    double fx = 0.0;
    try {
        fx = evaluate(f, x, opts.series_tol).value;
    } catch (const Error& e) {
        c.reason = std::string("f cannot be evaluated at the point: ") + e.what();
        return c;
    }
    c.evidence["objective_value"] = number_json(fx);
    if (!std::isfinite(fx)) {
        c.reason = "f is not finite at the point";
        return c;
    }

    const auto qual = check_qualification(set, x, opts.coords);
    const auto probes = probe_set(set, x, opts);
    const auto psc = check_psc(f, set, x, probes, opts.psc_depth, opts);
    const auto st = check_coordinates({{1.0, f}}, x, DualPoint::zero(), opts);
    c.evidence["qualification"] = to_json(qual);
    c.evidence["psc"] = to_json(psc);
    c.evidence["stationarity"] = detail::stationarity_json(st);
    c.coordinates = st.records;

    if (st.mismatch && detail::feasible_descent(*st.mismatch, set, x, opts.tol)) {
        c.verdict = Verdict::Fails;
        c.grade = st.mismatch->method == DerivMethod::Analytic ? Grade::analytic_all_n()
                                                               : Grade::numeric_first_n(opts.coords);
        c.reason = "descent direction along e_" + std::to_string(st.mismatch->n);
        c.witness = detail::coordinate_witness(*st.mismatch);
        return c;
    }

    json log = json::array();
    std::optional<json> probe_witness;
    for (const auto& [label, p] : probes) {
        json entry = {{"label", label}};
        try {
            const double v = evaluate(f, p, opts.series_tol).value;
            entry["value"] = number_json(v);
            if (!probe_witness && v < fx - opts.tol && set.contains(p).value_or(false))
                probe_witness = json{{"type", "probe"}, {"label", label}, {"point", to_json(p)},
                                     {"value", number_json(v)}, {"value_at_point", number_json(fx)}};
        } catch (const Error& e) {
            entry["error"] = e.what();
        }
        log.push_back(entry);
    }
    c.evidence["probes"] = log;
    if (probe_witness) {
        c.verdict = Verdict::Fails;
        c.grade = Grade::analytic_all_n();
        c.reason = "probe " + (*probe_witness)["label"].get<std::string>() + " has a smaller value";
        c.witness = *probe_witness;
        return c;
    }

    const bool stationary = st.all_match();
    const Grade st_grade = st.symbolic ? Grade::analytic_all_n() : Grade::numeric_first_n(opts.coords);
    c.grade = weakest(weakest(qual.grade, psc.grade), st_grade);
    if (qual.holds() && psc.holds() && stationary) {
        c.verdict = Verdict::Holds;
        c.reason = "qualified, pseudo-semicontinuous and stationary along every basis direction";
        return c;
    }
    std::vector<std::string> missing;
    if (!qual.holds()) missing.push_back("qualification " + std::string(to_string(qual.verdict)));
    if (!psc.holds()) missing.push_back("pseudo-semicontinuity " + std::string(to_string(psc.verdict)));
    if (st.nonexistent) missing.push_back("no derivative along e_" + std::to_string(st.nonexistent->n));
    else if (st.mismatch) missing.push_back("nonzero derivative along e_" + std::to_string(st.mismatch->n));
    std::string reason;
    for (const auto& m : missing) reason += (reason.empty() ? "" : "; ") + m;
    c.reason = reason;
    return c;
}

/// Whether p is a subgradient of f at x (on the whole space).
inline Certificate subgradient_test(const FunctionExpr& f, const Point& x, const DualPoint& p,
                                    const CertifyOptions& opts = {}) {
    Certificate c;
    const auto whole = SetDescriptor::whole_space();
    const auto psc = check_psc(f, whole, x, probe_set(whole, x, opts), opts.psc_depth, opts);
    const auto st = check_coordinates({{1.0, f}}, x, p, opts);
    c.evidence["psc"] = to_json(psc);
    c.evidence["stationarity"] = detail::stationarity_json(st);
    c.coordinates = st.records;
    const Grade st_grade = st.symbolic ? Grade::analytic_all_n() : Grade::numeric_first_n(opts.coords);
    c.grade = weakest(psc.grade, st_grade);
    if (st.mismatch) {
        // p_n outside [f'_-(x; e_n), f'_+(x; e_n)] rules out p for any convex f.
        c.verdict = Verdict::Fails;
        c.grade = st.mismatch->method == DerivMethod::Analytic ? Grade::analytic_all_n()
                                                               : Grade::numeric_first_n(opts.coords);
        c.reason = "coordinate " + std::to_string(st.mismatch->n) + " of p differs from the derivative";
        c.witness = detail::coordinate_witness(*st.mismatch);
        c.witness["p_n"] = p.coordinate(st.mismatch->n);
        return c;
    }
    if (!psc.holds()) {
        c.reason = "pseudo-semicontinuity " + std::string(to_string(psc.verdict));
        return c;
    }
    if (st.nonexistent) {
        c.reason = "no derivative along e_" + std::to_string(st.nonexistent->n);
        return c;
    }
    c.verdict = Verdict::Holds;
    c.reason = "p matches the derivative along every basis direction";
    return c;
}

// ---- Gateaux differentiability ----

/// df(x)(h) = sum_n f'(x; e_n) h_n.
struct GateauxDerivative {
    std::vector<double> head;        // coefficients 1..head.size()
    std::optional<ClosedForm> tail;  // coefficients for n > head.size(); absent for a numeric list

    bool analytic() const { return tail.has_value(); }

    double coefficient(std::size_t n) const {
        if (n == 0) throw InvalidArgument("coordinates are 1-based");
        if (n <= head.size()) return head[n - 1];
        if (tail) return (*tail)(n);
        return std::numeric_limits<double>::quiet_NaN();
    }

    /// Certified pairing for closed-form tails; a numeric list gives the
    /// truncated sum with an infinite error bound.
    SeriesValue apply(const Point& h, double tol = kDefaultSeriesTol) const {
        if (!tail) {
            CompensatedSum acc;
            for (std::size_t n = 1; n <= head.size(); ++n) acc.add(head[n - 1] * h.coordinate(n));
            return {acc.value(), std::numeric_limits<double>::infinity(), acc.count()};
        }
        const std::size_t m = std::max(head.size(), h.tail_start() - 1);
        CompensatedSum acc;
        for (std::size_t n = 1; n <= m; ++n) acc.add(coefficient(n) * h.coordinate(n));
        const auto rest = try_sum_closed_form(*tail * h.tail_form(), m + 1, tol);
        if (!rest) throw NonConvergentPairing("derivative does not pair with this direction");
        return SeriesValue{acc.value(), acc.rounding_bound(), acc.count()} + *rest;
    }
};

inline json to_json(const GateauxDerivative& d) {
    json out = {{"head", d.head}};
    if (d.tail) out["tail"] = d.tail->to_string();
    return out;
}

struct GateauxResult {
    Certificate certificate;
    std::optional<GateauxDerivative> derivative;
};

/// Sample directions used to validate an assembled derivative at x. Tails
/// decay faster than the tail of x so that difference quotients converge at
/// the usual rate.
inline std::vector<Point> validation_directions(const Point& x) {
    const double q = tail_decay_ratio(x);
    const double r = std::min(0.5, q * q);
    if (r == 0.0) return {basis_vector(1), Point({1.0, 0.5, 0.25}), Point({0.5, -1.0, 0.3})};
    return {basis_vector(1), Point({}, TailRule::geometric(1.0, r)),
            Point({0.5, -1.0}, TailRule::geometric(-0.3, -0.9 * r))};
}

inline GateauxResult gateaux_detect(const FunctionExpr& f, const Point& x, const CertifyOptions& opts = {},
                                    const std::vector<Point>& witness_directions = {}) {
    GateauxResult out;
    Certificate& c = out.certificate;
    const auto st = check_coordinates({{1.0, f}}, x, DualPoint::zero(), opts);
    c.coordinates = st.records;
    c.evidence["stationarity"] = detail::stationarity_json(st);
    const bool symbolic_existence = !opts.force_numeric && st.tail_right && !st.nonexistent &&
                                    (*st.tail_right - *st.tail_left).is_zero();
    c.grade = symbolic_existence ? Grade::analytic_all_n() : Grade::numeric_first_n(opts.coords);

    if (st.nonexistent) {
        // A Gateaux derivative would give two-sided derivatives in every direction.
        c.verdict = Verdict::Fails;
        c.grade = st.nonexistent->method == DerivMethod::Analytic ? Grade::analytic_all_n()
                                                                  : Grade::numeric_first_n(opts.coords);
        c.reason = "no derivative along e_" + std::to_string(st.nonexistent->n);
        c.witness = detail::coordinate_witness(*st.nonexistent);
        return out;
    }

    const bool applicable = opts.space.basis_is_topological && continuous_on(f, opts.space);
    if (!applicable) {
        DerivOptions dopts = opts.deriv;
        dopts.prefer_analytic = false;
        json log = json::array();
        for (std::size_t i = 0; i < witness_directions.size(); ++i) {
            const auto& h = witness_directions[i];
            try {
                const auto d = dir_deriv(f, x, h, dopts);
                log.push_back({{"direction", to_json(h)}, {"left", number_json(d.left)},
                               {"right", number_json(d.right)}, {"exists", d.exists}});
                if (!d.exists) {
                    c.verdict = Verdict::Fails;
                    c.grade = Grade::analytic_all_n();
                    c.reason = "no two-sided derivative along a supplied direction";
                    c.witness = {{"type", "direction"}, {"direction", to_json(h)},
                                 {"left", number_json(d.left)}, {"right", number_json(d.right)}};
                    c.evidence["directions"] = log;
                    return out;
                }
            } catch (const Error& e) {
                log.push_back({{"direction", to_json(h)}, {"error", e.what()}});
            }
        }
        if (!log.empty()) c.evidence["directions"] = log;
        c.reason = opts.space.basis_is_topological
                       ? "f is not known to be continuous; basis directions do not decide differentiability"
                       : "basis is not a Schauder basis; basis directions do not decide differentiability";
        return out;
    }

    GateauxDerivative d;
    if (symbolic_existence) {
        for (std::size_t n = 1; n < st.from; ++n)
            d.head.push_back(detail::analytic_record({{1.0, f}}, x, n).value);
        d.tail = *st.tail_right;
    } else {
        for (const auto& r : st.records) d.head.push_back(r.value);
    }

    DerivOptions dopts = opts.deriv;
    dopts.prefer_analytic = false;
    json checks = json::array();
    for (const auto& h : validation_directions(x)) {
        try {
            const double assembled = d.apply(h, opts.series_tol).value;
            const auto direct = dir_deriv(f, x, h, dopts);
            const double diff = std::abs(assembled - direct.value);
            checks.push_back({{"direction", to_json(h)}, {"assembled", number_json(assembled)},
                              {"direct", number_json(direct.value)}, {"difference", number_json(diff)}});
            if (d.analytic() && (!direct.exists || !(diff <= 1e-6))) {
                c.evidence["validation"] = checks;
                c.reason = "assembled derivative disagrees with the direct directional derivative";
                return out;
            }
        } catch (const Error& e) {
            checks.push_back({{"direction", to_json(h)}, {"error", e.what()}});
        }
    }
    c.evidence["validation"] = checks;
    c.evidence["derivative"] = to_json(d);
    c.verdict = Verdict::Holds;
    c.reason = "derivative exists along every basis direction";
    out.derivative = std::move(d);
    return out;
}

// ---- term-wise differentiation of series ----

/// f = sum_k f_k: either a finite list, or a separable series split into its terms.
struct TermFamily {
    std::vector<FunctionExpr> terms;
    std::optional<SeparableSeries> split;

    static TermFamily list(std::vector<FunctionExpr> fs) { return {std::move(fs), std::nullopt}; }
    static TermFamily of_series(SeparableSeries s) { return {{}, std::move(s)}; }
};

struct SeriesDiffResult {
    Certificate certificate;
    std::vector<double> values;      // f'(x; e_n) for n <= N
    std::optional<ClosedForm> tail;  // f'(x; e_n) for n >= tail_from
    std::size_t tail_from = 0;
};

namespace detail {

// u_n differentiable on (v - a, v + a).
inline bool inner_smooth_on(const ScalarConvex& u, double v, double a) {
    switch (u.kind) {
    case ScalarConvex::Kind::Abs: return std::abs(v) >= a;
    case ScalarConvex::Kind::NegSqrt: return u.c == 0.0 || v - a >= 0.0;
    default: return true;
    }
}

inline bool smooth_on_interval(const FunctionExpr& f, const Point& x, std::size_t n, double a) {
    for (const auto& [lambda, g] : summands(f)) {
        if (lambda == 0.0) continue;
        if (const auto* s = g.as<SeparableSeries>())
            if (s->weight_at(n) != 0.0 && !inner_smooth_on(s->inner, x.coordinate(n), a)) return false;
    }
    return true;
}

// Same condition for every n >= from, decided on closed forms.
inline std::optional<bool> inner_smooth_tail(const ScalarConvex& u, const ClosedForm& t, const ClosedForm& a,
                                             std::size_t from) {
    switch (u.kind) {
    case ScalarConvex::Kind::Abs: {
        const auto sg = strict_sign(t, from);
        if (!sg) return std::nullopt;
        if (*sg == 0) return a.is_zero();
        return nonnegative(static_cast<double>(*sg) * t - a, from);
    }
    case ScalarConvex::Kind::NegSqrt:
        if (u.c == 0.0) return true;
        return nonnegative(t - a, from);
    default: return true;
    }
}

inline ClosedForm majorant_form(const TailMajorant& m) {
    return ClosedForm::constant(m.bounded) + ClosedForm::monomial(m.geometric, m.ratio, 0.0);
}

// Closed-form bound on sup over |t - x_n| < a_n of |w_n u_n'(t)|.
inline std::optional<ClosedForm> derivative_bound(const SeparableSeries& s, const ClosedForm& t, const ClosedForm& a,
                                                  std::size_t from) {
    const auto mw = tail_majorant(s.weight.closed_form(), from);
    if (!mw) return std::nullopt;
    const ClosedForm w = majorant_form(*mw);
    auto bound = [&](const ClosedForm& cf) -> std::optional<ClosedForm> {
        const auto m = tail_majorant(cf, from);
        if (!m) return std::nullopt;
        return majorant_form(*m);
    };
    switch (s.inner.kind) {
    case ScalarConvex::Kind::Abs: return w;
    case ScalarConvex::Kind::Linear: {
        const auto b = bound(s.inner.b.closed_form());
        if (!b) return std::nullopt;
        return w * *b;
    }
    case ScalarConvex::Kind::Square:
    case ScalarConvex::Kind::AffineQuad: {
        const double q = s.inner.kind == ScalarConvex::Kind::Square ? 1.0 : s.inner.a;
        const auto bt = bound(t), ba = bound(a);
        const auto bb = bound(s.inner.b.closed_form());
        if (!bt || !ba || !bb) return std::nullopt;
        ClosedForm inner = (2.0 * q) * (*bt + *ba);
        if (s.inner.kind == ScalarConvex::Kind::AffineQuad) inner = inner + *bb;
        return w * inner;
    }
    case ScalarConvex::Kind::NegSqrt: {
        if (s.inner.c == 0.0) return ClosedForm{};
        const auto root = (t - a).sqrt();
        if (!root) return std::nullopt;
        const auto inv = root->reciprocal();
        if (!inv) return std::nullopt;
        return (0.5 * s.inner.c) * (w * *inv);
    }
    }
    return std::nullopt;
}

} // namespace detail

/// Differentiates sum_k f_k term by term along each e_n on the intervals
/// x + t e_n, |t| < a_n. Throws NoMajorant when uniform convergence of the
/// derivative series cannot be certified.
inline SeriesDiffResult series_differentiate(const TermFamily& family, const Point& x, const TailRule& radii,
                                             const CertifyOptions& opts = {}) {
    SeriesDiffResult out;
    Certificate& c = out.certificate;
    c.grade = Grade::numeric_first_n(opts.coords);
    const ClosedForm a_cf = radii.closed_form();
    std::vector<FunctionExpr> terms = family.terms;
    if (family.split) terms = {FunctionExpr(*family.split)};

    // (i) on the first N coordinates.
    for (std::size_t n = 1; n <= opts.coords; ++n) {
        for (std::size_t k = 0; k < terms.size(); ++k) {
            if (!detail::smooth_on_interval(terms[k], x, n, radii(n))) {
                c.verdict = Verdict::Fails;
                c.reason = "a term is not differentiable on the interval along e_" + std::to_string(n);
                c.witness = {{"type", "interval"}, {"n", n},
                             {"term", family.split ? n : k}, {"radius", radii(n)}};
                return out;
            }
        }
    }

    bool symbolic = !opts.force_numeric;
    std::vector<WeightedTerm> weighted;
    for (const auto& t : terms) weighted.push_back({1.0, t});

    if (family.split) {
        const SeparableSeries& s = *family.split;
        if (s.last == 0) {
            // (ii) and (iii): the derivative series along e_n has the single term
            // k = n, and sup over the interval of |f_k'| must be summable in k.
            const std::size_t from = std::max({x.tail_start(), s.first, std::size_t{1}});
            const auto bound = detail::derivative_bound(s, x.tail_form(), a_cf, from);
            const auto maj = bound ? tail_majorant(*bound, from) : std::nullopt;
            if (!maj || !maj->decays_geometrically())
                throw NoMajorant("derivative terms have no summable majorant on the intervals");
            c.evidence["derivative_majorant"] = {{"from", from}, {"amplitude", maj->geometric}, {"ratio", maj->ratio}};
            evaluate_finite(FunctionExpr(s), x, opts.series_tol);
        }
    }

    if (symbolic) {
        // (i) for every n beyond N.
        for (const auto& t : terms) {
            for (const auto& [lambda, g] : summands(t)) {
                const auto* s = g.as<SeparableSeries>();
                if (lambda == 0.0 || !s) continue;
                std::size_t from = std::max({x.tail_start(), s->first, opts.coords + 1});
                for (std::size_t n = opts.coords + 1; n < from && symbolic; ++n)
                    if (s->weight_at(n) != 0.0 && !detail::inner_smooth_on(s->inner, x.coordinate(n), radii(n)))
                        symbolic = false;
                if (s->last != 0 && s->last < from) continue;
                if (s->last != 0) {
                    symbolic = false;
                    continue;
                }
                const auto ok = detail::inner_smooth_tail(s->inner, x.tail_form(), a_cf, from);
                if (ok && !*ok) {
                    for (std::size_t n = from; n < from + detail::kWitnessScan; ++n) {
                        if (!detail::inner_smooth_on(s->inner, x.coordinate(n), radii(n))) {
                            c.verdict = Verdict::Fails;
                            c.grade = Grade::analytic_all_n();
                            c.reason = "a term is not differentiable on the interval along e_" + std::to_string(n);
                            c.witness = {{"type", "interval"}, {"n", n}, {"radius", radii(n)}};
                            return out;
                        }
                    }
                }
                if (!ok || !*ok) symbolic = false;
            }
        }
    }

    CertifyOptions copts = opts;
    copts.force_numeric = false;
    const auto st = check_coordinates(weighted, x, DualPoint::zero(), copts);
    for (const auto& r : st.records) out.values.push_back(r.value);
    c.coordinates = st.records;
    if (st.tail_right && (*st.tail_right - *st.tail_left).is_zero()) {
        out.tail = *st.tail_right;
        out.tail_from = st.from;
        c.evidence["tail_from"] = st.from;
        c.evidence["tail_derivative"] = st.tail_right->to_string();
    } else {
        symbolic = false;
    }
    c.verdict = Verdict::Holds;
    c.grade = symbolic ? Grade::analytic_all_n() : Grade::numeric_first_n(opts.coords);
    c.reason = "each term is differentiable on the intervals and the derivative series converges uniformly";
    return out;
}

// ---- KKT multipliers ----

struct KktProblem {
    FunctionExpr objective;
    std::vector<FunctionExpr> inequalities;  // g_j <= 0
    std::vector<FunctionExpr> equalities;    // h_k = 0
    SetDescriptor set;
};

/// Checks supplied multipliers; only sufficiency is certified.
inline Certificate kkt_certify(const KktProblem& prob, const Point& x, const std::vector<double>& lambda,
                               const std::vector<double>& nu, const CertifyOptions& opts = {}) {
    if (lambda.size() != prob.inequalities.size() || nu.size() != prob.equalities.size())
        throw InvalidArgument("kkt_certify: one multiplier per constraint is required");
    for (double l : lambda)
        if (!(l >= 0.0)) throw InvalidArgument("kkt_certify: inequality multipliers must be >= 0");

    const auto member = prob.set.contains(x);
    if (member && !*member) throw InfeasiblePoint("point is not in the feasible set");
    std::vector<double> gvals, hvals;
    for (std::size_t j = 0; j < prob.inequalities.size(); ++j) {
        const double v = evaluate(prob.inequalities[j], x, opts.series_tol).value;
        if (!(v <= opts.tol))
            throw InfeasiblePoint("inequality constraint " + std::to_string(j + 1) + " is violated at the point");
        gvals.push_back(v);
    }
    for (std::size_t k = 0; k < prob.equalities.size(); ++k) {
        const double v = evaluate(prob.equalities[k], x, opts.series_tol).value;
        if (!(std::abs(v) <= opts.tol))
            throw InfeasiblePoint("equality constraint " + std::to_string(k + 1) + " is violated at the point");
        hvals.push_back(v);
    }

    Certificate c;
    c.evidence["objective_value"] = number_json(evaluate(prob.objective, x, opts.series_tol).value);
    c.evidence["lambda"] = lambda;
    c.evidence["nu"] = nu;
    c.evidence["inequality_values"] = gvals;
    c.evidence["equality_values"] = hvals;

    const auto qual = check_qualification(prob.set, x, opts.coords);
    c.evidence["qualification"] = to_json(qual);
    const auto probes = probe_set(prob.set, x, opts);
    Grade grade = qual.grade;
    std::vector<std::string> missing;
    if (!qual.holds()) missing.push_back("qualification " + std::string(to_string(qual.verdict)));
    json psc_log = json::array();
    auto psc_of = [&](const std::string& name, const FunctionExpr& g) {
        const auto p = check_psc(g, prob.set, x, probes, opts.psc_depth, opts);
        psc_log.push_back({{"function", name}, {"certificate", to_json(p)}});
        grade = weakest(grade, p.grade);
        if (!p.holds()) missing.push_back("pseudo-semicontinuity of " + name + " " + to_string(p.verdict));
    };
    psc_of("f", prob.objective);
    for (std::size_t j = 0; j < prob.inequalities.size(); ++j) psc_of("g" + std::to_string(j + 1), prob.inequalities[j]);
    for (std::size_t k = 0; k < prob.equalities.size(); ++k) psc_of("h" + std::to_string(k + 1), prob.equalities[k]);
    c.evidence["psc"] = psc_log;

    for (std::size_t j = 0; j < gvals.size(); ++j)
        if (std::abs(lambda[j] * gvals[j]) > opts.tol)
            missing.push_back("complementary slackness fails for constraint " + std::to_string(j + 1));

    std::vector<WeightedTerm> lagrangian{{1.0, prob.objective}};
    for (std::size_t j = 0; j < lambda.size(); ++j) lagrangian.push_back({lambda[j], prob.inequalities[j]});
    for (std::size_t k = 0; k < nu.size(); ++k) lagrangian.push_back({nu[k], prob.equalities[k]});
    const auto st = check_coordinates(lagrangian, x, DualPoint::zero(), opts);
    c.coordinates = st.records;
    c.evidence["stationarity"] = detail::stationarity_json(st);
    grade = weakest(grade, st.symbolic ? Grade::analytic_all_n() : Grade::numeric_first_n(opts.coords));
    if (st.nonexistent) missing.push_back("Lagrangian has no derivative along e_" + std::to_string(st.nonexistent->n));
    else if (st.mismatch) missing.push_back("Lagrangian is not stationary along e_" + std::to_string(st.mismatch->n));

    c.grade = grade;
    if (missing.empty()) {
        c.verdict = Verdict::Holds;
        c.reason = "multipliers certify that the point minimizes f over the constrained set";
        return c;
    }
    std::string reason;
    for (const auto& m : missing) reason += (reason.empty() ? "" : "; ") + m;
    c.reason = reason;
    return c;
}

} // namespace seqcert
