#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>

#include "seqcert/closed_form.hpp"
#include "seqcert/error.hpp"
#include "seqcert/seqspace.hpp"

namespace seqcert {

/// Convex feasible sets: the whole space, l1 intersected with the positive
/// orthant, or a coordinate box with tail-rule bounds.
struct SetDescriptor {
    enum class Kind { WholeSpace, PositiveConeEll1, Box };

    Kind kind = Kind::WholeSpace;
    Point lower;
    Point upper;

    static SetDescriptor whole_space() { return {}; }
    static SetDescriptor positive_cone_ell1() { return {Kind::PositiveConeEll1, {}, {}}; }
    static SetDescriptor box(Point lower, Point upper) {
        return {Kind::Box, std::move(lower), std::move(upper)};
    }

    /// Membership; nullopt when the sign of some tail cannot be decided.
    std::optional<bool> contains(const Point& x) const {
        switch (kind) {
        case Kind::WholeSpace: return true;
        case Kind::PositiveConeEll1:
            if (!in_ell1(x)) return false;
            return all_nonnegative(x);
        case Kind::Box: {
            const auto lo = all_nonnegative(x - lower);
            const auto hi = all_nonnegative(upper - x);
            if (lo && !*lo) return false;
            if (hi && !*hi) return false;
            if (!lo || !hi) return std::nullopt;
            return true;
        }
        }
        return std::nullopt;
    }

    /// Bounds on coordinate n of points of X (X^k is the product of these for n <= k).
    std::pair<double, double> coordinate_bounds(std::size_t n) const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (kind) {
        case Kind::WholeSpace: return {-inf, inf};
        case Kind::PositiveConeEll1: return {0.0, inf};
        case Kind::Box: return {lower.coordinate(n), upper.coordinate(n)};
        }
        return {-inf, inf};
    }

    friend bool operator==(const SetDescriptor&, const SetDescriptor&) = default;

private:
    static std::optional<bool> all_nonnegative(const Point& d) {
        for (double v : d.prefix())
            if (v < 0.0) return false;
        return nonnegative(d.tail_form(), d.tail_start());
    }
};

inline const char* to_string(SetDescriptor::Kind k) {
    switch (k) {
    case SetDescriptor::Kind::WholeSpace: return "whole";
    case SetDescriptor::Kind::PositiveConeEll1: return "positive_cone_ell1";
    case SetDescriptor::Kind::Box: return "box";
    }
    return "?";
}

} // namespace seqcert
