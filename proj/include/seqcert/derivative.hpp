#pragma once

// Numeric directional derivatives of convex functions.
//
// For convex phi(t) = f(x + t h) the right difference quotients
// (phi(t) - phi(0)) / t are nonincreasing as t decreases to 0 and the left
// ones are nondecreasing as t increases to 0. The last right quotient is thus
// an upper bound on the right derivative and the last left quotient a lower
// bound on the left derivative, so their gap bounds |right - left|. Existence
// is decided on that bound; Richardson extrapolation only produces the
// reported values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seqcert/error.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/seqspace.hpp"

namespace seqcert {

struct DerivOptions {
    double t0 = 0.0;            // initial step; 0 selects 1e-2 * max(1, |x_n|)
    std::size_t steps = 40;     // J: halvings of the step
    double tol_match = 1e-7;    // |right - left| threshold for existence
    double noise_scale = 16.0;  // noise floor = noise_scale * eps * (|f(x)| + 1) / t
    bool prefer_analytic = true;
    double series_tol = 1e-16;  // tail tolerance of each function evaluation
};

enum class DerivMethod { Analytic, Numeric };

inline const char* to_string(DerivMethod m) { return m == DerivMethod::Analytic ? "analytic" : "numeric"; }

struct QuotientSample {
    double t = 0.0;
    double quotient = 0.0;
};

struct DirDerivResult {
    double right = 0.0;
    double left = 0.0;
    bool exists = false;
    double value = std::numeric_limits<double>::quiet_NaN();
    double noise_floor = 0.0;
    double gap_bound = 0.0;       // certified bound on right - left (numeric path)
    double kink_estimate = 0.0;   // extrapolated right - left (numeric path)
    bool exists_certified = true; // existence decided by gap_bound alone
    std::vector<QuotientSample> quotients_log;
    DerivMethod method = DerivMethod::Numeric;
};

namespace detail {

// Richardson extrapolation of samples a_j taken at t0 / 2^j with error
// expansion in powers of t^order; returns the entry with the smallest
// error estimate (Ridders' selection rule).
inline double richardson(const std::vector<double>& a, double order) {
    if (a.empty()) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = a.size();
    std::vector<std::vector<double>> table(n);
    double best = a.back();
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        table[j].push_back(a[j]);
        double factor = std::pow(2.0, order);
        for (std::size_t m = 1; m <= j; ++m) {
            const double v = (factor * table[j][m - 1] - table[j - 1][m - 1]) / (factor - 1.0);
            table[j].push_back(v);
            const double err = std::max(std::abs(v - table[j][m - 1]), std::abs(v - table[j - 1][m - 1]));
            if (err <= best_err) {
                best_err = err;
                best = v;
            }
            factor *= std::pow(2.0, order);
        }
        if (j > 0 && std::abs(table[j][j] - table[j - 1][j - 1]) >= 2.0 * best_err && best_err < 1e-6) break;
    }
    return best;
}

inline double default_step(const Point& x, const Point& h) {
    if (const auto n = basis_index(h)) return 1e-2 * std::max(1.0, std::abs(x.coordinate(*n)));
    const double hx = sup_bound(h);
    return 1e-2 / std::max(1.0, std::isfinite(hx) ? hx : 1.0);
}

} // namespace detail

/// One-sided and two-sided derivative of f at x along h.
inline DirDerivResult dir_deriv(const FunctionExpr& f, const Point& x, const Point& h,
                                const DerivOptions& opts = {}) {
    if (opts.prefer_analytic) {
        if (const auto n = basis_index(h)) {
            const auto a = analytic_dir_deriv(f, x, *n);
            DirDerivResult r;
            r.method = DerivMethod::Analytic;
            r.left = a.left;
            r.right = a.right;
            r.exists = a.exists();
            r.value = a.value();
            return r;
        }
    }

    const double eps = std::numeric_limits<double>::epsilon();
    const auto f0v = evaluate(f, x, opts.series_tol);
    if (f0v.is_infinite()) throw DomainViolation("dir_deriv: base point outside the domain");
    const double f0 = f0v.value;
    auto phi = [&](double t) { return evaluate(f, x + t * h, opts.series_tol); };

    double t0 = opts.t0 > 0.0 ? opts.t0 : detail::default_step(x, h);
    SeriesValue fp = phi(t0), fm = phi(-t0);
    for (int i = 0; i < 60 && (fp.is_infinite() || fm.is_infinite()); ++i) {
        t0 *= 0.5;
        fp = phi(t0);
        fm = phi(-t0);
    }
    if (fp.is_infinite() || fm.is_infinite())
        throw DomainLimited("dir_deriv: only one side of the base point lies in the domain");
    if (opts.t0 <= 0.0 && t0 < detail::default_step(x, h)) {
        // Domain-limited start: keep clear of the boundary singularity.
        t0 *= 0.125;
        fp = phi(t0);
        fm = phi(-t0);
    }

    DirDerivResult r;
    r.method = DerivMethod::Numeric;
    std::vector<double> right_q, left_q, central;
    std::vector<double> noise;
    double t = t0;
    for (std::size_t j = 0; j <= opts.steps; ++j, t *= 0.5) {
        if (j > 0) {
            fp = phi(t);
            fm = phi(-t);
            if (fp.is_infinite() || fm.is_infinite())
                throw NonConvexBehavior("dir_deriv: domain shrank while the step decreased");
        }
        const double qr = (fp.value - f0) / t;
        const double ql = (fm.value - f0) / -t;
        const double nz = opts.noise_scale * eps * (std::abs(f0) + 1.0) / t +
                          2.0 * (fp.error_bound + fm.error_bound + 2.0 * f0v.error_bound) / t;
        r.quotients_log.push_back({t, qr});
        r.quotients_log.push_back({-t, ql});
        if (!right_q.empty()) {
            if (qr > right_q.back() + 10.0 * nz || ql < left_q.back() - 10.0 * nz)
                throw NonConvexBehavior("dir_deriv: difference quotients are not monotone (non-convex input?)");
            if (ql > qr + 10.0 * nz)
                throw NonConvexBehavior("dir_deriv: left quotient exceeds right quotient");
        }
        const bool settled = !right_q.empty() && std::abs(qr - right_q.back()) < nz &&
                             std::abs(ql - left_q.back()) < nz;
        right_q.push_back(qr);
        left_q.push_back(ql);
        central.push_back(0.5 * (qr + ql));
        noise.push_back(nz);
        if (settled) break;
    }

    // Certified gap: smallest right - left among steps whose noise is well below tol_match.
    double gap = std::numeric_limits<double>::infinity();
    double floor = noise.back();
    for (std::size_t j = 0; j < right_q.size(); ++j) {
        if (noise[j] > 0.25 * opts.tol_match && j + 1 != right_q.size()) continue;
        const double g = right_q[j] - left_q[j] + 2.0 * noise[j];
        if (g < gap) {
            gap = g;
            floor = noise[j];
        }
    }
    r.noise_floor = floor;
    r.gap_bound = std::max(gap, 0.0);
    r.right = detail::richardson(right_q, 1.0);
    r.left = detail::richardson(left_q, 1.0);
    // gap_j = kink + c t_j + O(t_j^2); the extrapolated kink settles existence
    // when the certified gap is still dominated by curvature.
    std::vector<double> gaps(right_q.size());
    for (std::size_t j = 0; j < gaps.size(); ++j) gaps[j] = right_q[j] - left_q[j];
    r.kink_estimate = detail::richardson(gaps, 1.0);
    if (r.gap_bound <= opts.tol_match) {
        r.exists = true;
    } else {
        r.exists = std::abs(r.kink_estimate) <= 0.5 * opts.tol_match && std::isfinite(r.kink_estimate);
        r.exists_certified = false;
    }
    if (r.exists) {
        // Early steps may straddle a nearby kink; extrapolate over the trailing
        // samples and keep the value inside the certified bracket.
        const std::size_t keep = std::min<std::size_t>(central.size(), 8);
        const std::vector<double> tail(central.end() - static_cast<std::ptrdiff_t>(keep), central.end());
        const double lo = left_q.back() - noise.back(), hi = right_q.back() + noise.back();
        r.value = std::clamp(detail::richardson(tail, 2.0), std::min(lo, hi), std::max(lo, hi));
    }
    return r;
}

/// dir_deriv along e_1 .. e_N; errors are rethrown as CoordinateError(n).
inline std::vector<DirDerivResult> dir_deriv_profile(const FunctionExpr& f, const Point& x, std::size_t count,
                                                     const DerivOptions& opts = {}) {
    std::vector<DirDerivResult> out;
    out.reserve(count);
    for (std::size_t n = 1; n <= count; ++n) {
        try {
            out.push_back(dir_deriv(f, x, basis_vector(n), opts));
        } catch (const Error& e) {
            throw CoordinateError(n, e.what());
        }
    }
    return out;
}

} // namespace seqcert
