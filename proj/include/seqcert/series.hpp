#pragma once

// Certified summation of infinite real series.
//
// Every routine here returns a value together with a bound on its distance
// to the exact sum. Tail bounds come from analytic majorants supplied by the
// caller; rounding of the partial sum is tracked with a compensated
// accumulator and added to the reported bound.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>

#include "seqcert/error.hpp"

namespace seqcert {

inline constexpr double kDefaultSeriesTol = 1e-12;
inline constexpr std::size_t kMaxSeriesTerms = 50'000'000;

/// A series sum with |value - exact| <= error_bound.
struct SeriesValue {
    double value = 0.0;
    double error_bound = 0.0;
    std::size_t terms_used = 0;

    bool is_infinite() const { return std::isinf(value); }

    static SeriesValue infinity() {
        return {std::numeric_limits<double>::infinity(), 0.0, 0};
    }
};

inline SeriesValue operator+(const SeriesValue& a, const SeriesValue& b) {
    return {a.value + b.value, a.error_bound + b.error_bound, a.terms_used + b.terms_used};
}

inline SeriesValue operator*(double s, const SeriesValue& a) {
    if (a.is_infinite()) return s == 0.0 ? SeriesValue{} : a;
    return {s * a.value, std::abs(s) * a.error_bound, a.terms_used};
}

/// Neumaier compensated summation with a running bound on rounding error.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
        abs_ += std::abs(x);
        ++count_;
    }

    double value() const { return sum_ + comp_; }

    /// Bound on |value() - exact sum of the added doubles|.
    double rounding_bound() const {
        constexpr double eps = std::numeric_limits<double>::epsilon();
        return 2.0 * eps * abs_ + eps * std::abs(value());
    }

    std::size_t count() const { return count_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    double abs_ = 0.0;
    std::size_t count_ = 0;
};

/// |term(n)| <= amplitude * ratio^n for every n >= from.
struct GeometricMajorant {
    std::size_t from = 1;
    double amplitude = 0.0;
    double ratio = 0.0;
};

/// Sum of term(n) over n >= first, truncated once the majorant tail is <= tol.
///
/// The reported error bound is the majorant tail plus the rounding bound of the
/// partial sum. Throws NoMajorant when the majorant is not summable or would
/// need more than kMaxSeriesTerms terms.
inline SeriesValue certified_series(const std::function<double(std::size_t)>& term,
                                    const GeometricMajorant& majorant, double tol,
                                    std::size_t first = 1) {
    if (!(tol > 0.0)) throw InvalidArgument("certified_series: tol must be positive");
    const double amp = std::abs(majorant.amplitude);
    const double ratio = std::abs(majorant.ratio);
    if (amp > 0.0 && !(ratio < 1.0))
        throw NoMajorant("certified_series: majorant ratio " + std::to_string(ratio) + " is not < 1");
    if (!std::isfinite(amp)) throw NoMajorant("certified_series: majorant amplitude is not finite");

    // Last index K with K >= from - 1 and amp * ratio^(K+1) / (1 - ratio) <= tol.
    std::size_t last = majorant.from > first ? majorant.from - 1 : first - 1;
    double tail = 0.0;
    if (amp > 0.0 && ratio > 0.0) {
        const double scale = amp / (1.0 - ratio);
        const double needed = std::log(tol / scale) / std::log(ratio) - 1.0;
        if (needed > static_cast<double>(last)) {
            if (needed > static_cast<double>(kMaxSeriesTerms))
                throw NoMajorant("certified_series: majorant converges too slowly");
            last = static_cast<std::size_t>(std::ceil(needed));
        }
        tail = scale * std::pow(ratio, static_cast<double>(last + 1));
        while (tail > tol) {
            ++last;
            tail *= ratio;
        }
    }

    CompensatedSum acc;
    for (std::size_t n = first; n <= last; ++n) {
        const double v = term(n);
        if (std::isinf(v) && v > 0) return SeriesValue::infinity();
        if (!std::isfinite(v)) throw DomainViolation("certified_series: term " + std::to_string(n) + " is not finite");
        acc.add(v);
    }
    return {acc.value(), tail + acc.rounding_bound(), acc.count()};
}

/// Hurwitz zeta tail sum_{k>=0} (k + a)^(-s) for s > 1, a > 0, by Euler-Maclaurin.
inline SeriesValue hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw InvalidArgument("hurwitz_zeta requires s > 1 and a > 0");
    // B_{2j} / (2j)! for j = 1..7.
    static constexpr double kBernoulliOverFactorial[] = {
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    };
    CompensatedSum acc;
    double x = a;
    std::size_t head = 0;
    while (x < 40.0) {
        acc.add(std::pow(x, -s));
        x += 1.0;
        ++head;
    }
    acc.add(std::pow(x, 1.0 - s) / (s - 1.0));
    acc.add(0.5 * std::pow(x, -s));
    // Rising factorial s (s+1) ... (s + 2j - 2) times x^(-s-2j+1).
    double rising = s;
    double power = std::pow(x, -s - 1.0);
    double last_term = 0.0;
    constexpr std::size_t kTerms = 6;
    for (std::size_t j = 0; j < kTerms; ++j) {
        last_term = kBernoulliOverFactorial[j] * rising * power;
        acc.add(last_term);
        rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        power /= x * x;
    }
    const double next = std::abs(kBernoulliOverFactorial[kTerms] * rising * power);
    return {acc.value(), 2.0 * next + acc.rounding_bound(), head + kTerms + 2};
}

} // namespace seqcert
