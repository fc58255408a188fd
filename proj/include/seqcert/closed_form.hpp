#pragma once

// Closed forms in the index n: finite sums of monomials c * q^n * n^e.
//
// This is the coefficient algebra in which tails of points, weights of
// separable series and basis-direction derivatives are expressed. Monomials
// with distinct (q, e) are linearly independent as functions on any infinite
// set of indices, so a normalized closed form is identically zero on a tail
// iff it has no terms.
//
// Inputs arrive as doubles and square roots appear (weighted sqrt objectives),
// so bases and exponents are matched, and coefficients cancelled, up to a
// relative tolerance of kClosedFormRelTol.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seqcert/series.hpp"

namespace seqcert {

inline constexpr double kClosedFormRelTol = 1e-12;

namespace detail {

inline bool nearly_equal(double a, double b, double rel = kClosedFormRelTol) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double ipow(double q, std::size_t n) { return std::pow(q, static_cast<double>(n)); }

} // namespace detail

/// coef * base^n * n^exponent
struct Monomial {
    double coef = 0.0;
    double base = 1.0;
    double exponent = 0.0;

    double operator()(std::size_t n) const {
        if (coef == 0.0) return 0.0;
        const double nd = static_cast<double>(n);
        double v = coef * detail::ipow(base, n);
        if (exponent != 0.0) v *= std::pow(nd, exponent);
        return v;
    }
};

class ClosedForm {
public:
    ClosedForm() = default;

    static ClosedForm constant(double c) { return monomial(c, 1.0, 0.0); }

    static ClosedForm monomial(double coef, double base, double exponent) {
        ClosedForm cf;
        cf.terms_.push_back({coef, base, exponent});
        cf.normalize();
        return cf;
    }

    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double operator()(std::size_t n) const {
        CompensatedSum acc;
        for (const auto& m : terms_) acc.add(m(n));
        return acc.value();
    }

    friend ClosedForm operator+(const ClosedForm& a, const ClosedForm& b) {
        ClosedForm out;
        out.terms_ = a.terms_;
        out.terms_.insert(out.terms_.end(), b.terms_.begin(), b.terms_.end());
        out.normalize();
        return out;
    }

    friend ClosedForm operator*(double s, const ClosedForm& a) {
        ClosedForm out = a;
        for (auto& m : out.terms_) m.coef *= s;
        out.normalize();
        return out;
    }

    friend ClosedForm operator-(const ClosedForm& a, const ClosedForm& b) { return a + (-1.0) * b; }

    friend ClosedForm operator*(const ClosedForm& a, const ClosedForm& b) {
        ClosedForm out;
        for (const auto& x : a.terms_)
            for (const auto& y : b.terms_)
                out.terms_.push_back({x.coef * y.coef, x.base * y.base, x.exponent + y.exponent});
        out.normalize();
        return out;
    }

    /// Square root; available for a single monomial with positive coefficient and base.
    std::optional<ClosedForm> sqrt() const {
        if (terms_.size() != 1) return std::nullopt;
        const auto& m = terms_.front();
        if (m.coef <= 0.0 || m.base <= 0.0) return std::nullopt;
        return monomial(std::sqrt(m.coef), std::sqrt(m.base), 0.5 * m.exponent);
    }

    /// Reciprocal; available for a single monomial.
    std::optional<ClosedForm> reciprocal() const {
        if (terms_.size() != 1) return std::nullopt;
        const auto& m = terms_.front();
        return monomial(1.0 / m.coef, 1.0 / m.base, -m.exponent);
    }

    /// sign(value(n)) as a closed form; available for a single monomial.
    std::optional<ClosedForm> sign() const {
        if (terms_.size() != 1) return std::nullopt;
        const auto& m = terms_.front();
        return monomial(m.coef > 0.0 ? 1.0 : -1.0, m.base > 0.0 ? 1.0 : -1.0, 0.0);
    }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        os.precision(12);
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            const auto& m = terms_[i];
            if (i) os << " + ";
            os << m.coef;
            if (m.base != 1.0) os << "*(" << m.base << ")^n";
            if (m.exponent != 0.0) os << "*n^(" << m.exponent << ")";
        }
        return os.str();
    }

private:
    void normalize() {
        std::vector<Monomial> in;
        in.reserve(terms_.size());
        for (const auto& m : terms_)
            if (m.coef != 0.0 && m.base != 0.0) in.push_back(m);
        std::sort(in.begin(), in.end(), [](const Monomial& a, const Monomial& b) {
            return a.base != b.base ? a.base < b.base : a.exponent < b.exponent;
        });
        std::vector<Monomial> out;
        std::vector<double> mags;
        for (const auto& m : in) {
            bool merged = false;
            for (std::size_t i = 0; i < out.size(); ++i) {
                if (detail::nearly_equal(out[i].base, m.base) &&
                    detail::nearly_equal(out[i].exponent, m.exponent)) {
                    out[i].coef += m.coef;
                    mags[i] += std::abs(m.coef);
                    merged = true;
                    break;
                }
            }
            if (!merged) {
                out.push_back(m);
                mags.push_back(std::abs(m.coef));
            }
        }
        terms_.clear();
        for (std::size_t i = 0; i < out.size(); ++i)
            if (std::abs(out[i].coef) > kClosedFormRelTol * mags[i]) terms_.push_back(out[i]);
    }

    std::vector<Monomial> terms_;
};

namespace detail {

// Growth order: larger |q| dominates, then larger exponent.
inline bool dominates(const Monomial& a, const Monomial& b) {
    const double qa = std::abs(a.base), qb = std::abs(b.base);
    if (!nearly_equal(qa, qb)) return qa > qb;
    return a.exponent > b.exponent && !nearly_equal(a.exponent, b.exponent);
}

struct DominantSplit {
    Monomial top;
    std::vector<Monomial> rest;
    bool oscillating_tie = false;
};

inline DominantSplit split_dominant(const ClosedForm& cf) {
    const auto& t = cf.terms();
    std::size_t best = 0;
    for (std::size_t i = 1; i < t.size(); ++i)
        if (dominates(t[i], t[best])) best = i;
    DominantSplit s{t[best], {}, false};
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i == best) continue;
        if (!dominates(t[best], t[i])) s.oscillating_tie = true;
        s.rest.push_back(t[i]);
    }
    return s;
}

// Smallest N >= from (up to a cap) such that for all n >= N the dominant
// monomial exceeds twice the absolute sum of the others.
inline std::optional<std::size_t> domination_start(const DominantSplit& s, std::size_t from) {
    const double q0 = std::abs(s.top.base);
    std::size_t n_dec = from;
    for (const auto& m : s.rest) {
        const double rho = std::abs(m.base) / q0;
        const double de = m.exponent - s.top.exponent;
        if (de > 0.0 && rho < 1.0) {
            const double n_star = de / -std::log(rho);
            n_dec = std::max(n_dec, static_cast<std::size_t>(std::ceil(n_star)) + 1);
        }
    }
    auto ratio_sum = [&](std::size_t n) {
        const double nd = static_cast<double>(n);
        double sum = 0.0;
        for (const auto& m : s.rest) {
            const double lr = std::log(std::abs(m.coef) / std::abs(s.top.coef)) +
                              nd * std::log(std::abs(m.base) / q0) +
                              (m.exponent - s.top.exponent) * std::log(nd);
            sum += std::exp(lr);
        }
        return sum;
    };
    std::size_t n = std::max<std::size_t>(n_dec, 1);
    for (int i = 0; i < 60; ++i) {
        if (ratio_sum(n) < 0.5) return n;
        n *= 2;
    }
    return std::nullopt;
}

inline constexpr std::size_t kMaxSignScan = 4'000'000;

} // namespace detail

/// +1 / -1 when cf(n) has that strict sign for every n >= from, 0 when cf is
/// identically zero, nullopt when the sign is not constant or undecided.
inline std::optional<int> strict_sign(const ClosedForm& cf, std::size_t from) {
    if (cf.is_zero()) return 0;
    const auto split = detail::split_dominant(cf);
    if (split.oscillating_tie || split.top.base < 0.0) return std::nullopt;
    const int sign = split.top.coef > 0.0 ? 1 : -1;
    if (split.rest.empty()) return sign;
    const auto start = detail::domination_start(split, from);
    if (!start || *start - from > detail::kMaxSignScan) return std::nullopt;
    for (std::size_t n = from; n < *start; ++n) {
        const double v = cf(n);
        if (!(sign * v > 0.0)) return std::nullopt;
    }
    return sign;
}

/// Whether cf(n) >= 0 for every n >= from; nullopt when undecided.
inline std::optional<bool> nonnegative(const ClosedForm& cf, std::size_t from) {
    if (cf.is_zero()) return true;
    const auto split = detail::split_dominant(cf);
    if (split.oscillating_tie) {
        for (std::size_t n = from; n < from + 4096; ++n)
            if (cf(n) < 0.0) return false;
        return std::nullopt;
    }
    // A dominant alternating or negative monomial forces negative values eventually.
    if (split.top.base < 0.0 || split.top.coef < 0.0) return false;
    if (split.rest.empty()) return true;
    const auto start = detail::domination_start(split, from);
    if (!start || *start - from > detail::kMaxSignScan) return std::nullopt;
    for (std::size_t n = from; n < *start; ++n)
        if (cf(n) < 0.0) return false;
    return true;
}

/// First n in [from, from + limit) with |cf(n)| > threshold.
inline std::optional<std::size_t> first_exceeding(const ClosedForm& cf, std::size_t from,
                                                  double threshold, std::size_t limit = 100'000) {
    if (cf.is_zero()) return std::nullopt;
    for (std::size_t n = from; n < from + limit; ++n)
        if (std::abs(cf(n)) > threshold) return n;
    return std::nullopt;
}

/// Majorant |cf(n)| <= bounded + geometric * ratio^n for n >= from.
struct TailMajorant {
    double bounded = 0.0;   // non-decaying part (|q| = 1 monomials)
    double geometric = 0.0; // amplitude of the geometrically decaying part
    double ratio = 0.0;

    /// Bound on |cf(m)| for every m >= n.
    double at(std::size_t n) const { return bounded + geometric * std::pow(ratio, static_cast<double>(n)); }
    bool decays_geometrically() const { return bounded == 0.0; }
};

/// nullopt when cf is unbounded on n >= from.
inline std::optional<TailMajorant> tail_majorant(const ClosedForm& cf, std::size_t from) {
    TailMajorant out;
    const double k = static_cast<double>(std::max<std::size_t>(from, 1));
    for (const auto& m : cf.terms()) {
        const double q = std::abs(m.base);
        const double c = std::abs(m.coef);
        if (detail::nearly_equal(q, 1.0)) {
            if (m.exponent > 0.0) return std::nullopt;
            out.bounded += c * std::pow(k, m.exponent);
        } else if (q > 1.0) {
            return std::nullopt;
        } else if (m.exponent <= 0.0) {
            out.geometric += c * std::pow(k, m.exponent);
            out.ratio = std::max(out.ratio, q);
        } else {
            // n^e q^n = qs^n (n^e qs^n) with qs = sqrt(q); the bracket peaks at e / -ln(qs).
            const double qs = std::sqrt(q);
            const double peak = std::max(k, m.exponent / -std::log(qs));
            out.geometric += c * std::pow(peak, m.exponent) * std::pow(qs, peak);
            out.ratio = std::max(out.ratio, qs);
        }
    }
    // Each geometric amplitude multiplies its own ratio_j^n <= ratio^n.
    return out;
}

/// Absolutely convergent sum of cf(n) over n >= from; nullopt when divergent.
inline std::optional<SeriesValue> try_sum_closed_form(const ClosedForm& cf, std::size_t from,
                                                      double tol = kDefaultSeriesTol) {
    if (from == 0) from = 1;
    SeriesValue total;
    const double tol_each = tol / static_cast<double>(std::max<std::size_t>(cf.terms().size(), 1));
    for (const auto& m : cf.terms()) {
        const double q = std::abs(m.base);
        const double e = m.exponent;
        if (detail::nearly_equal(q, 1.0)) {
            if (!(e < -1.0) || detail::nearly_equal(e, -1.0)) return std::nullopt;
            const double s = -e;
            const double a = static_cast<double>(from);
            SeriesValue part;
            if (m.base > 0.0) {
                part = hurwitz_zeta(s, a);
            } else {
                // Alternating: split into even and odd indices.
                const std::size_t first_even = from % 2 == 0 ? from : from + 1;
                const std::size_t first_odd = from % 2 == 1 ? from : from + 1;
                const auto even = hurwitz_zeta(s, static_cast<double>(first_even) / 2.0);
                const auto odd = hurwitz_zeta(s, static_cast<double>(first_odd) / 2.0);
                const double scale = std::pow(2.0, -s);
                part = {scale * (even.value - odd.value), scale * (even.error_bound + odd.error_bound),
                        even.terms_used + odd.terms_used};
            }
            total = total + m.coef * part;
            continue;
        }
        if (q > 1.0) return std::nullopt;
        if (e == 0.0) {
            const double v = m.coef * detail::ipow(m.base, from) / (1.0 - m.base);
            total = total + SeriesValue{v, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v), 1};
            continue;
        }
        CompensatedSum acc;
        std::size_t n = from;
        double bound = 0.0;
        for (;; ++n) {
            acc.add(m(n));
            const double next = static_cast<double>(n + 1);
            const double step = e <= 0.0 ? q : q * std::pow(1.0 + 1.0 / next, e);
            if (step < 1.0) {
                bound = std::abs(m(n + 1)) / (1.0 - step);
                if (bound <= tol_each) break;
            }
            if (n - from > kMaxSeriesTerms) return std::nullopt;
        }
        total = total + SeriesValue{acc.value(), bound + acc.rounding_bound(), acc.count()};
    }
    return total;
}

} // namespace seqcert
