#pragma once

// Seeded random points and directions from the tail grammar.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "seqcert/seqspace.hpp"
#include "seqcert/sets.hpp"

namespace seqcert {

class PointSampler {
public:
    explicit PointSampler(std::uint64_t seed = 42) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::size_t index(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

    /// A tail rule whose sequence lies in the given space.
    TailRule tail(SpaceKind space) {
        const std::size_t pick = index(0, space == SpaceKind::Ell1 ? 1 : 3);
        const double c = uniform(-1.5, 1.5);
        switch (pick) {
        case 0: return TailRule::geometric(c, uniform(-0.8, 0.8));
        case 1: return TailRule::zero();
        case 2: return TailRule::harmonic(c);
        default: return TailRule::constant(c);
        }
    }

    /// Point of `space` lying in `set`.
    Point point(SpaceKind space, const SetDescriptor& set = SetDescriptor::whole_space()) {
        const std::size_t len = index(0, 5);
        switch (set.kind) {
        case SetDescriptor::Kind::WholeSpace: {
            std::vector<double> prefix(len);
            for (auto& v : prefix) v = uniform(-2.0, 2.0);
            return Point(prefix, tail(space));
        }
        case SetDescriptor::Kind::PositiveConeEll1: {
            std::vector<double> prefix(len);
            for (auto& v : prefix) v = uniform(0.0, 2.0);
            if (index(0, 3) == 0) return Point(prefix);
            return Point(prefix, TailRule::geometric(uniform(0.01, 1.5), uniform(0.05, 0.8)));
        }
        case SetDescriptor::Kind::Box: {
            // lower + theta (upper - lower), theta in [0, 1] coordinatewise on the prefix.
            const double theta = uniform(0.0, 1.0);
            Point x = set.lower + theta * (set.upper - set.lower);
            std::vector<double> prefix(std::max(len, x.prefix().size()));
            for (std::size_t n = 1; n <= prefix.size(); ++n) {
                const double lo = set.lower.coordinate(n), hi = set.upper.coordinate(n);
                prefix[n - 1] = lo + uniform(0.0, 1.0) * (hi - lo);
            }
            return project(Point(prefix), prefix.size(), x);
        }
        }
        return Point::zero();
    }

    /// Random point whose coordinates are all nonzero (tails of strict sign).
    Point nonzero_point(SpaceKind space) {
        std::vector<double> prefix(index(0, 5));
        for (auto& v : prefix) v = (index(0, 1) ? 1.0 : -1.0) * uniform(0.1, 2.0);
        const double c = (index(0, 1) ? 1.0 : -1.0) * uniform(0.1, 1.5);
        const std::size_t pick = index(0, space == SpaceKind::Ell1 ? 0 : 2);
        switch (pick) {
        case 0: return Point(prefix, TailRule::geometric(c, uniform(0.05, 0.8)));
        case 1: return Point(prefix, TailRule::harmonic(c));
        default: return Point(prefix, TailRule::constant(c));
        }
    }

    /// Direction with a geometric or zero tail; lies in every space.
    Point direction(double max_ratio = 0.7) {
        std::vector<double> prefix(index(1, 5));
        for (auto& v : prefix) v = uniform(-1.0, 1.0);
        if (index(0, 1) == 0 || max_ratio <= 0.0) return Point(prefix);
        return Point(prefix, TailRule::geometric(uniform(-1.0, 1.0), uniform(-max_ratio, max_ratio)));
    }

    /// Direction whose tail decays faster than the tail of x, so x + t h keeps
    /// the signs of x far out for small t.
    Point direction_subordinate_to(const Point& x) {
        const double q = tail_decay_ratio(x);
        return direction(std::min(0.7, q * q));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace seqcert
