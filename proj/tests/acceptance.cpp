// Acceptance criteria AC1-AC9: one PASS/FAIL line each, exit status 1 on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "property_checks.hpp"
#include "seqcert/certify.hpp"
#include "seqcert/reduce.hpp"

using namespace seqcert;

namespace {

constexpr double kBeta = 0.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            note.str("");
            note << "failed: " << what;
        }
    }
};

FunctionExpr harmonic_objective() {
    return combine_sum({limsup_seminorm(), separable(TailRule::geometric(1.0, kBeta),
                                                     ScalarConvex::affine_quad(1.0, TailRule::harmonic(-1.0)))});
}

FunctionExpr sqrt_objective() {
    return combine_sum({separable(TailRule::constant(1.0), ScalarConvex::linear(TailRule::constant(1.0))),
                        separable(TailRule::geometric(2.0, kBeta), ScalarConvex::neg_sqrt(1.0))});
}

FunctionExpr stationary_objective() {
    return combine_sum({limsup_seminorm(), separable(TailRule::geometric(1.0, kBeta),
                                                     ScalarConvex::affine_quad(1.0, TailRule::constant(-2.0)))});
}

// -1/4 sum beta^n / n^2 in long double.
double harmonic_value_oracle() {
    long double s = 0.0L, b = 1.0L;
    for (int n = 1; n <= 200; ++n) {
        b *= kBeta;
        s += b / (static_cast<long double>(n) * n);
    }
    return static_cast<double>(-s / 4.0L);
}

CertifyOptions ell1() {
    CertifyOptions o;
    o.space = SpaceDescriptor::ell1();
    return o;
}

DerivOptions numeric() {
    DerivOptions o;
    o.prefer_analytic = false;
    return o;
}

Outcome ac1() {
    Outcome r;
    const Point x({}, TailRule::harmonic(0.5));
    const auto start = Clock::now();
    const auto c = certify_min(harmonic_objective(), SetDescriptor::whole_space(), x);
    const auto prof = dir_deriv_profile(harmonic_objective(), x, 64, numeric());
    const double fx = evaluate(harmonic_objective(), x).value;
    const double secs = seconds_since(start);
    r.require(c.holds(), "certify_min verdict " + std::string(to_string(c.verdict)));
    r.require(c.grade.analytic, "grade " + c.grade.to_string());
    for (const auto& rec : c.coordinates) r.require(rec.value == 0.0, "analytic derivative nonzero");
    double worst = 0.0;
    for (const auto& d : prof) worst = std::max(worst, d.exists ? std::abs(d.value) : INFINITY);
    r.require(worst < 1e-8, "numeric profile max |f'| = " + std::to_string(worst));
    r.require(std::abs(fx - harmonic_value_oracle()) <= 1e-5 && std::abs(fx + 0.145560) <= 1e-5, "f(x*)");
    r.require(secs < 1.0, "runtime");
    if (r.ok)
        r.note << "HOLDS " << c.grade.to_string() << ", max|f'| numeric " << worst << ", f(x*) = " << fx
               << " (oracle " << harmonic_value_oracle() << "), " << secs << " s";
    return r;
}

Outcome ac2() {
    Outcome r;
    const Point x({}, TailRule::harmonic(0.5));
    const double fx = harmonic_value_oracle();
    double worst_y = 0.0, worst_v = 0.0;
    for (std::size_t k : {1, 2, 4, 8}) {
        const auto m = minimize_reduced(build_reduced(harmonic_objective(), SetDescriptor::whole_space(), x, k));
        for (std::size_t i = 0; i < k; ++i) worst_y = std::max(worst_y, std::abs(m.y[i] - 1.0 / (2.0 * (i + 1))));
        worst_v = std::max(worst_v, std::abs(m.value - fx));
    }
    r.require(worst_y <= 1e-6, "minimizer error " + std::to_string(worst_y));
    r.require(worst_v <= 1e-6, "value error " + std::to_string(worst_v));
    if (r.ok) r.note << "k in {1,2,4,8}: max minimizer error " << worst_y << ", max value error " << worst_v;
    return r;
}

Outcome ac3() {
    Outcome r;
    const auto cone = SetDescriptor::positive_cone_ell1();
    const Point x({}, TailRule::geometric(1.0, kBeta * kBeta));
    const auto c = certify_min(sqrt_objective(), cone, x, ell1());
    const auto q = check_qualification(cone, x, 64);
    const auto p = check_psc(sqrt_objective(), cone, x, probe_set(cone, x, ell1()), 64, ell1());
    const double fx = evaluate(sqrt_objective(), x).value;
    const double b2 = kBeta * kBeta, ref = -b2 / (1.0 - b2);
    r.require(c.holds(), "certify_min verdict " + std::string(to_string(c.verdict)) + ": " + c.reason);
    r.require(q.holds() && q.grade.analytic, "qualification " + q.grade.to_string());
    r.require(p.holds() && p.grade.analytic, "pseudo-semicontinuity " + p.grade.to_string());
    r.require(std::abs(fx - ref) <= 1e-9, "f(x*) = " + std::to_string(fx));
    double worst = 0.0;
    for (std::size_t k : {1, 2, 4, 8}) {
        const auto m = minimize_reduced(build_reduced(sqrt_objective(), cone, x, k));
        worst = std::max(worst, std::abs(m.value - fx));
    }
    r.require(worst <= 1e-6, "oracle error " + std::to_string(worst));
    if (r.ok)
        r.note << "HOLDS " << c.grade.to_string() << ", f(x*) = " << fx << " (closed form " << ref
               << "), oracle error " << worst;
    return r;
}

Outcome ac4() {
    Outcome r;
    const Point x({}, TailRule::constant(1.0));
    const auto whole = SetDescriptor::whole_space();
    const auto c = certify_min(stationary_objective(), whole, x);
    const auto p = check_psc(stationary_objective(), whole, x, probe_set(whole, x, {}), 64, {});
    const double s = kBeta / (1.0 - kBeta);
    const double g1 = 1.0 - s, ghalf = 0.5 - 0.75 * s;
    r.require(c.fails(), "certify_min verdict " + std::string(to_string(c.verdict)));
    if (c.fails()) {
        r.require(c.witness.value("label", "") == "half", "witness label");
        r.require(std::abs(c.witness["value"].get<double>() - ghalf) <= 1e-9, "g(1/2,...)");
        r.require(std::abs(c.witness["value_at_point"].get<double>() - g1) <= 1e-9, "g(1,...)");
    }
    r.require(p.fails(), "check_psc verdict " + std::string(to_string(p.verdict)));
    if (p.fails()) {
        r.require(p.witness.value("label", "") == "zero", "psc witness label");
        r.require(std::abs(p.witness["seminorm_lhs"].get<double>() - 1.0) <= 1e-12 &&
                      p.witness["seminorm_rhs"].get<double>() == 0.0,
                  "seminorm witness values");
    }
    if (r.ok)
        r.note << "FAILS: g(1,1,...) = " << c.witness["value_at_point"].get<double>() << ", g(1/2,...) = "
               << c.witness["value"].get<double>() << "; check_psc FAILS at x = 0 with p(x*) = "
               << p.witness["seminorm_lhs"].get<double>() << " > 0 = p(0)";
    return r;
}

Outcome ac5() {
    Outcome r;
    PointSampler s(5);
    for (int i = 0; i < 5; ++i) {
        const Point x = s.point(SpaceKind::EllInf);
        for (const auto& d : dir_deriv_profile(limsup_seminorm(), x, 64, numeric()))
            r.require(d.exists && d.value == 0.0, "basis derivative of limsup at " + to_json(x).dump());
    }
    const auto basis_only = gateaux_detect(limsup_seminorm(), Point::zero());
    r.require(basis_only.certificate.verdict == Verdict::Inconclusive, "basis-only verdict");
    const auto w = gateaux_detect(limsup_seminorm(), Point::zero(), {}, {Point({}, TailRule::constant(1.0))});
    r.require(w.certificate.fails(), "witness verdict");
    if (w.certificate.fails()) {
        r.require(std::abs(w.certificate.witness["left"].get<double>() + 1.0) <= 1e-7 &&
                      std::abs(w.certificate.witness["right"].get<double>() - 1.0) <= 1e-7,
                  "witness one-sided derivatives");
    }
    if (r.ok)
        r.note << "profile exists(0) for n <= 64 at 5 points; basis only INCONCLUSIVE; direction (1,1,...) FAILS with left "
               << w.certificate.witness["left"].get<double>() << ", right " << w.certificate.witness["right"].get<double>();
    return r;
}

// Shared with AC7.
std::vector<std::pair<Point, GateauxDerivative>> g_holds;

Outcome ac6() {
    Outcome r;
    PointSampler s(6);
    std::size_t holds = 0, fails = 0;
    for (int i = 0; i < 10; ++i) {
        const Point x = s.nonzero_point(SpaceKind::Ell1);
        const auto g = gateaux_detect(l1_norm(), x, ell1());
        r.require(g.certificate.holds() && g.derivative, "HOLDS at " + to_json(x).dump());
        if (g.certificate.holds() && g.derivative) {
            ++holds;
            g_holds.emplace_back(x, *g.derivative);
        }
    }
    for (int i = 0; i < 10; ++i) {
        const Point base = s.nonzero_point(SpaceKind::Ell1);
        const std::size_t m = s.index(1, 8);
        const Point x = project(base, m, base) + (-base.coordinate(m)) * basis_vector(m);
        const auto g = gateaux_detect(l1_norm(), x, ell1());
        const bool ok = g.certificate.fails() && g.certificate.witness.value("n", 0u) == m;
        r.require(ok, "FAILS with n = " + std::to_string(m) + " at " + to_json(x).dump());
        if (ok) ++fails;
    }
    if (r.ok) r.note << holds << "/10 nonzero points HOLDS, " << fails << "/10 zero-coordinate points FAILS at the zero index";
    return r;
}

Outcome ac7() {
    Outcome r;
    PointSampler s(7);
    double worst = 0.0;
    r.require(!g_holds.empty(), "no HOLDS points from AC6");
    for (const auto& [x, d] : g_holds) {
        for (int j = 0; j < 5; ++j) {
            const Point h = s.direction_subordinate_to(x);
            const auto num = dir_deriv(l1_norm(), x, h, numeric());
            const double err = num.exists ? std::abs(d.apply(h).value - num.value) : INFINITY;
            worst = std::max(worst, err);
        }
    }
    r.require(worst < 1e-6, "max error " + std::to_string(worst));
    if (r.ok) r.note << g_holds.size() << " points x 5 directions, max |df(x)(h) - f'(x;h)| = " << worst;
    return r;
}

Outcome ac8() {
    Outcome r;
    const auto f = separable(TailRule::geometric(1.0, kBeta), ScalarConvex::square());
    const KktProblem prob{f, {affine(DualPoint({-1.0}), 1.0)}, {}, SetDescriptor::whole_space()};
    const Point x = basis_vector(1);
    const auto c = kkt_certify(prob, x, {2.0 * kBeta}, {});
    r.require(c.holds(), "verdict " + std::string(to_string(c.verdict)) + ": " + c.reason);
    ConstraintSet cs;
    cs.inequalities = prob.inequalities;
    double worst = 0.0;
    for (std::size_t k : {1, 2, 4}) {
        const auto m = minimize_reduced(build_reduced(f, prob.set, x, k, cs));
        worst = std::max(worst, std::abs(m.value - 0.5));
    }
    r.require(worst <= 1e-6, "oracle error " + std::to_string(worst));
    const auto wrong = kkt_certify(prob, x, {0.0}, {});
    r.require(wrong.verdict == Verdict::Inconclusive, "lambda = 0 verdict " + std::string(to_string(wrong.verdict)));
    if (r.ok) r.note << "HOLDS " << c.grade.to_string() << ", oracle error " << worst << ", lambda = 0 INCONCLUSIVE";
    return r;
}

Outcome ac9() {
    Outcome r;
    const auto start = Clock::now();
    const auto results = seqcert::testing::all_properties(42);
    const double secs = seconds_since(start);
    std::size_t cases = 0;
    for (const auto& p : results) {
        r.require(p.ok && p.cases > 0, p.name + ": " + p.detail);
        cases += p.cases;
    }
    r.require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
    if (r.ok) r.note << results.size() << " properties, " << cases << " cases, " << secs << " s";
    return r;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
        {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.note.str("");
            o.note << "exception: " << e.what();
        }
        std::printf("%s %s %s\n", name, o.ok ? "PASS" : "FAIL", o.note.str().c_str());
        if (!o.ok) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
