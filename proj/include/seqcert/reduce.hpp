#pragma once

// Finite-dimensional reductions f^k(y) = f(x* + P^k(embed(y) - x*)) and a
// brute-force convex minimizer over X^k used as an independent oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "seqcert/derivative.hpp"
#include "seqcert/error.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/seqspace.hpp"
#include "seqcert/sets.hpp"

namespace seqcert {

/// Extra constraints g_j(x) <= 0 and h_k(x) = 0 restricting X to Gamma.
struct ConstraintSet {
    std::vector<FunctionExpr> inequalities;
    std::vector<FunctionExpr> equalities;
    double tol = 1e-10;

    bool empty() const { return inequalities.empty() && equalities.empty(); }
};

class ReducedProblem {
public:
    ReducedProblem(FunctionExpr f, SetDescriptor set, Point anchor, std::size_t k, ConstraintSet constraints = {},
                   double series_tol = 1e-15)
        : f_(std::move(f)), set_(std::move(set)), anchor_(std::move(anchor)), k_(k),
          constraints_(std::move(constraints)), series_tol_(series_tol) {
        if (k_ == 0) throw InvalidArgument("reduced problems need k >= 1");
    }

    std::size_t dimension() const { return k_; }
    const Point& anchor() const { return anchor_; }
    const FunctionExpr& objective() const { return f_; }
    const SetDescriptor& set() const { return set_; }
    const ConstraintSet& constraints() const { return constraints_; }

    /// P^k(x*) in coordinates.
    std::vector<double> anchor_coordinates() const {
        std::vector<double> y(k_);
        for (std::size_t i = 0; i < k_; ++i) y[i] = anchor_.coordinate(i + 1);
        return y;
    }

    Point embed(const std::vector<double>& y) const {
        if (y.size() != k_) throw InvalidArgument("reduced point has the wrong dimension");
        return seqcert::embed(y, anchor_);
    }

    std::pair<double, double> bounds(std::size_t i) const { return set_.coordinate_bounds(i + 1); }

    bool feasible(const std::vector<double>& y) const {
        for (std::size_t i = 0; i < k_; ++i) {
            const auto [lo, hi] = bounds(i);
            if (y[i] < lo || y[i] > hi) return false;
        }
        if (constraints_.empty()) return true;
        const Point x = embed(y);
        for (const auto& g : constraints_.inequalities) {
            const auto v = seqcert::evaluate(g, x, series_tol_);
            if (v.is_infinite() || v.value > constraints_.tol) return false;
        }
        for (const auto& h : constraints_.equalities) {
            const auto v = seqcert::evaluate(h, x, series_tol_);
            if (v.is_infinite() || std::abs(v.value) > constraints_.tol) return false;
        }
        return true;
    }

    /// f^k(y); +inf outside X^k (and Gamma) or outside the domain of f.
    SeriesValue evaluate(const std::vector<double>& y) const {
        if (!feasible(y)) return SeriesValue::infinity();
        return seqcert::evaluate(f_, embed(y), series_tol_);
    }

    double operator()(const std::vector<double>& y) const { return evaluate(y).value; }

private:
    FunctionExpr f_;
    SetDescriptor set_;
    Point anchor_;
    std::size_t k_;
    ConstraintSet constraints_;
    double series_tol_;
};

/// Builds f^k around x*; evaluates f(x*) so domain errors surface here.
inline ReducedProblem build_reduced(const FunctionExpr& f, const SetDescriptor& set, const Point& anchor,
                                    std::size_t k, ConstraintSet constraints = {}) {
    const auto member = set.contains(anchor);
    if (member && !*member) throw InvalidArgument("build_reduced: anchor is not in the feasible set");
    evaluate_finite(f, anchor);
    return ReducedProblem(f, set, anchor, k, std::move(constraints));
}

/// Partial derivatives of f^k at y; throws PartialNotDifferentiable(i) (1-based).
inline std::vector<double> grad_reduced(const ReducedProblem& rp, const std::vector<double>& y,
                                        const DerivOptions& opts = {}) {
    const Point x = rp.embed(y);
    std::vector<double> g(rp.dimension());
    for (std::size_t i = 1; i <= rp.dimension(); ++i) {
        const auto d = dir_deriv(rp.objective(), x, basis_vector(i), opts);
        if (!d.exists) throw PartialNotDifferentiable(i);
        g[i - 1] = d.value;
    }
    return g;
}

struct MinimizeOptions {
    std::size_t max_sweeps = 10'000;
    double bound = 1e6;          // |y_i| beyond this reports Unbounded
    double decrease_tol = 1e-14; // stop when a sweep improves less than this
    double width = 1e-12;        // ternary search interval width
    std::optional<std::vector<double>> start;
};

struct ReducedMinimum {
    std::vector<double> y;
    double value = 0.0;
    std::size_t sweeps = 0;
};

namespace detail {

// Minimizes a convex extended-valued phi on [lo, hi] given a point c with phi(c) finite.
template <class Phi>
double line_minimize(const Phi& phi, double c, double lo, double hi, const MinimizeOptions& opts) {
    const double fc = phi(c);
    const double step0 = std::max(1.0, std::abs(c)) * 0.25;

    auto expand = [&](double dir) {
        double prev = c, fprev = fc, s = step0;
        for (;;) {
            double t = c + dir * s;
            t = std::clamp(t, lo, hi);
            const double ft = phi(t);
            if (ft >= fprev || t == lo || t == hi) return t;
            if (std::abs(t) > opts.bound) throw Unbounded("minimize_reduced: iterate exceeds the divergence bound");
            prev = t;
            fprev = ft;
            s *= 2.0;
        }
        (void)prev;
    };
    double left = expand(-1.0);
    double right = expand(1.0);

    while (right - left > std::max(opts.width, 4.0 * std::numeric_limits<double>::epsilon() *
                                                   std::max(std::abs(left), std::abs(right)))) {
        const double m1 = left + (right - left) / 3.0;
        const double m2 = right - (right - left) / 3.0;
        const double f1 = phi(m1), f2 = phi(m2);
        if (std::isinf(f1) && std::isinf(f2)) {
            if (c < m1) right = m1;
            else left = m2;
        } else if (f1 < f2) {
            right = m2;
        } else if (f1 > f2) {
            left = m1;
        } else {
            left = m1;
            right = m2;
        }
    }
    double best = c, fbest = fc;
    for (double t : {left, right, 0.5 * (left + right)}) {
        const double ft = phi(t);
        if (ft < fbest) {
            best = t;
            fbest = ft;
        }
    }
    return best;
}

} // namespace detail

/// Cyclic coordinate descent with exact convex line search over X^k.
inline ReducedMinimum minimize_reduced(const ReducedProblem& rp, const MinimizeOptions& opts = {}) {
    const std::size_t k = rp.dimension();
    std::vector<double> y;
    if (opts.start) {
        y = *opts.start;
        if (y.size() != k) throw InvalidArgument("minimize_reduced: start has the wrong dimension");
    } else {
        // Start away from the anchor so the oracle does not just return it.
        y.assign(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            const auto [lo, hi] = rp.bounds(i);
            y[i] = std::clamp(0.0, lo, hi);
        }
        if (std::isinf(rp(y))) {
            y = rp.anchor_coordinates();
            for (std::size_t i = 0; i < k; ++i) {
                const auto [lo, hi] = rp.bounds(i);
                y[i] = std::clamp(y[i] + 1.0, lo, hi);
            }
        }
        if (std::isinf(rp(y))) y = rp.anchor_coordinates();
    }
    double value = rp(y);
    if (std::isinf(value)) throw DomainViolation("minimize_reduced: no feasible starting point");

    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        const double before = value;
        for (std::size_t i = 0; i < k; ++i) {
            auto phi = [&](double t) {
                auto z = y;
                z[i] = t;
                return rp(z);
            };
            const auto [lo, hi] = rp.bounds(i);
            y[i] = detail::line_minimize(phi, y[i], lo, hi, opts);
            if (std::abs(y[i]) > opts.bound) throw Unbounded("minimize_reduced: iterate exceeds the divergence bound");
        }
        value = rp(y);
        if (before - value < opts.decrease_tol) return {y, value, sweep};
    }
    throw MaxSweeps("minimize_reduced: sweep limit reached");
}

} // namespace seqcert
