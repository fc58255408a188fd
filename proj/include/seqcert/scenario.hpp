#pragma once

// Scenario files: a task, its inputs and an optional expected verdict, and
// the report produced by running one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqcert/certify.hpp"
#include "seqcert/derivative.hpp"
#include "seqcert/error.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/reduce.hpp"
#include "seqcert/serialize.hpp"
#include "seqcert/sets.hpp"

namespace seqcert {

enum class Task { CertifyMin, Gateaux, Subgradient, Kkt, Psc, Qualification, SeriesDiff, DirProfile };

inline const char* to_string(Task t) {
    switch (t) {
    case Task::CertifyMin: return "certify_min";
    case Task::Gateaux: return "gateaux";
    case Task::Subgradient: return "subgradient";
    case Task::Kkt: return "kkt";
    case Task::Psc: return "psc";
    case Task::Qualification: return "qualification";
    case Task::SeriesDiff: return "series_diff";
    case Task::DirProfile: return "dir_profile";
    }
    return "?";
}

inline std::optional<Task> task_from_string(const std::string& s) {
    for (Task t : {Task::CertifyMin, Task::Gateaux, Task::Subgradient, Task::Kkt, Task::Psc, Task::Qualification,
                   Task::SeriesDiff, Task::DirProfile})
        if (s == to_string(t)) return t;
    return std::nullopt;
}

struct ScenarioParameters {
    double beta = 0.5;
    double tol = 1e-7;
    std::size_t coords = 64;
    std::size_t psc_depth = 64;
    std::vector<std::size_t> oracle_k{1, 2, 4, 8};

    friend bool operator==(const ScenarioParameters&, const ScenarioParameters&) = default;
};

struct Expectation {
    std::string verdict;
    json witness = json::object();  // subset of the certificate witness

    friend bool operator==(const Expectation&, const Expectation&) = default;
};

struct Scenario {
    std::string name;
    std::string description;
    SpaceDescriptor space = SpaceDescriptor::ellinf();
    Task task = Task::CertifyMin;
    std::optional<FunctionExpr> function;
    std::optional<Point> point;
    SetDescriptor set = SetDescriptor::whole_space();
    std::vector<Point> probes;
    std::optional<DualPoint> dual;
    std::vector<Point> directions;
    std::vector<FunctionExpr> inequalities;
    std::vector<FunctionExpr> equalities;
    std::vector<double> lambda;
    std::vector<double> nu;
    std::vector<FunctionExpr> terms;
    std::optional<SeparableSeries> family;
    TailRule radii = TailRule::constant(1.0);
    ScenarioParameters parameters;
    std::optional<Expectation> expected;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// ---- parsing ----

namespace detail {

template <class T, class F>
std::vector<T> parse_list(const json& j, const ParseContext& ctx, F&& item) {
    if (!j.is_array()) ctx.fail("expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], ctx.at(i)));
    return out;
}

inline ScenarioParameters parse_parameters(const json& j, const ParseContext& ctx) {
    require_object(j, ctx, {"beta", "tol", "coords", "psc_depth", "oracle_k"});
    ScenarioParameters p;
    if (j.contains("beta")) p.beta = parse_number(j["beta"], ctx.at("beta"));
    if (j.contains("tol")) p.tol = parse_number(j["tol"], ctx.at("tol"));
    if (j.contains("coords")) p.coords = parse_index(j["coords"], ctx.at("coords"));
    if (j.contains("psc_depth")) p.psc_depth = parse_index(j["psc_depth"], ctx.at("psc_depth"));
    if (j.contains("oracle_k"))
        p.oracle_k = parse_list<std::size_t>(j["oracle_k"], ctx.at("oracle_k"), parse_index);
    if (!(p.beta > 0.0 && p.beta < 1.0)) ctx.at("beta").fail("beta must lie in (0, 1)");
    if (!(p.tol > 0.0)) ctx.at("tol").fail("tol must be positive");
    if (p.coords == 0) ctx.at("coords").fail("coords must be positive");
    if (p.psc_depth < 2) ctx.at("psc_depth").fail("psc_depth must be at least 2");
    for (std::size_t k : p.oracle_k)
        if (k == 0) ctx.at("oracle_k").fail("oracle dimensions must be positive");
    return p;
}

} // namespace detail

/// Parses one scenario object; `beta` comes from its parameters.
inline Scenario parse_scenario(const json& j, const ParseContext& outer = {}) {
    using detail::field;
    detail::require_object(j, outer,
                           {"name", "description", "space", "task", "function", "point", "set", "probes", "dual",
                            "directions", "constraints", "terms", "family", "radii", "parameters", "expected"});
    Scenario s;
    if (j.contains("parameters")) s.parameters = detail::parse_parameters(j["parameters"], outer.at("parameters"));
    const ParseContext ctx{s.parameters.beta, outer.path};

    s.name = detail::parse_string(field(j, "name", ctx), ctx.at("name"));
    if (j.contains("description")) s.description = detail::parse_string(j["description"], ctx.at("description"));
    const std::string task = detail::parse_string(field(j, "task", ctx), ctx.at("task"));
    const auto t = task_from_string(task);
    if (!t) ctx.at("task").fail("unknown task \"" + task + "\"");
    s.task = *t;
    if (j.contains("space")) s.space = parse_space(j["space"], ctx.at("space"));
    if (j.contains("function")) s.function = parse_function(j["function"], ctx.at("function"));
    if (j.contains("point")) s.point = parse_point(j["point"], ctx.at("point"));
    if (j.contains("set")) s.set = parse_set(j["set"], ctx.at("set"));
    if (j.contains("probes")) s.probes = detail::parse_list<Point>(j["probes"], ctx.at("probes"), parse_point);
    if (j.contains("dual")) s.dual = parse_dual_point(j["dual"], ctx.at("dual"));
    if (j.contains("directions"))
        s.directions = detail::parse_list<Point>(j["directions"], ctx.at("directions"), parse_point);
    if (j.contains("constraints")) {
        const auto c = ctx.at("constraints");
        const json& cj = j["constraints"];
        detail::require_object(cj, c, {"inequalities", "equalities", "lambda", "nu"});
        if (cj.contains("inequalities"))
            s.inequalities = detail::parse_list<FunctionExpr>(cj["inequalities"], c.at("inequalities"), parse_function);
        if (cj.contains("equalities"))
            s.equalities = detail::parse_list<FunctionExpr>(cj["equalities"], c.at("equalities"), parse_function);
        if (cj.contains("lambda")) s.lambda = detail::parse_list<double>(cj["lambda"], c.at("lambda"), parse_number);
        if (cj.contains("nu")) s.nu = detail::parse_list<double>(cj["nu"], c.at("nu"), parse_number);
    }
    if (j.contains("terms")) s.terms = detail::parse_list<FunctionExpr>(j["terms"], ctx.at("terms"), parse_function);
    if (j.contains("family")) {
        const auto f = parse_function(j["family"], ctx.at("family"));
        const auto* sep = f.as<SeparableSeries>();
        if (!sep) ctx.at("family").fail("a term family must be a separable series");
        s.family = *sep;
    }
    if (j.contains("radii")) s.radii = parse_tail_rule(j["radii"], ctx.at("radii"));
    if (j.contains("expected")) {
        const auto e = ctx.at("expected");
        const json& ej = j["expected"];
        detail::require_object(ej, e, {"verdict", "witness"});
        Expectation ex;
        ex.verdict = detail::parse_string(field(ej, "verdict", e), e.at("verdict"));
        if (ex.verdict != "HOLDS" && ex.verdict != "FAILS" && ex.verdict != "INCONCLUSIVE")
            e.at("verdict").fail("expected HOLDS, FAILS or INCONCLUSIVE");
        if (ej.contains("witness")) {
            if (!ej["witness"].is_object()) e.at("witness").fail("expected an object");
            ex.witness = ej["witness"];
        }
        s.expected = ex;
    }

    auto need = [&](bool ok, const char* what) {
        if (!ok) ctx.fail(std::string("task ") + task + " requires \"" + what + "\"");
    };
    need(s.point.has_value(), "point");
    if (s.task != Task::Qualification && s.task != Task::SeriesDiff) need(s.function.has_value(), "function");
    if (s.task == Task::Subgradient) need(s.dual.has_value(), "dual");
    if (s.task == Task::SeriesDiff) need(!s.terms.empty() || s.family.has_value(), "terms\" or \"family");
    if (s.task == Task::Kkt && (s.lambda.size() != s.inequalities.size() || s.nu.size() != s.equalities.size()))
        ctx.at("constraints").fail("one multiplier per constraint is required");
    return s;
}

inline json to_json(const Scenario& s) {
    json out = {{"name", s.name}, {"task", to_string(s.task)}, {"space", to_json(s.space)}};
    if (!s.description.empty()) out["description"] = s.description;
    if (s.function) out["function"] = to_json(*s.function);
    if (s.point) out["point"] = to_json(*s.point);
    if (!(s.set == SetDescriptor::whole_space())) out["set"] = to_json(s.set);
    auto list = [](const auto& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back(to_json(x));
        return a;
    };
    if (!s.probes.empty()) out["probes"] = list(s.probes);
    if (s.dual) out["dual"] = to_json(*s.dual);
    if (!s.directions.empty()) out["directions"] = list(s.directions);
    if (!s.inequalities.empty() || !s.equalities.empty()) {
        out["constraints"] = {{"inequalities", list(s.inequalities)}, {"equalities", list(s.equalities)},
                              {"lambda", s.lambda}, {"nu", s.nu}};
    }
    if (!s.terms.empty()) out["terms"] = list(s.terms);
    if (s.family) out["family"] = to_json(FunctionExpr(*s.family));
    if (!(s.radii == TailRule::constant(1.0))) out["radii"] = to_json(s.radii);
    const auto& p = s.parameters;
    out["parameters"] = {{"beta", p.beta}, {"tol", p.tol}, {"coords", p.coords}, {"psc_depth", p.psc_depth},
                         {"oracle_k", p.oracle_k}};
    if (s.expected) {
        out["expected"] = {{"verdict", s.expected->verdict}};
        if (!s.expected->witness.empty()) out["expected"]["witness"] = s.expected->witness;
    }
    return out;
}

/// JSON text with the line number of syntax errors.
inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto > 0 ? upto - 1 : 0), '\n');
        throw ParseError(source + ":" + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
}

/// A scenario object or an array of them.
inline std::vector<Scenario> parse_scenarios(const json& j, const std::string& source) {
    try {
        if (j.is_array()) {
            std::vector<Scenario> out;
            for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_scenario(j[i], ParseContext{}.at(i)));
            return out;
        }
        return {parse_scenario(j)};
    } catch (const ParseError& e) {
        throw ParseError(source + ": " + e.what());
    }
}

// ---- builtins ----

struct Builtin {
    const char* name;
    const char* description;
    const char* json_text;
};

inline const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> list{
        {"example1", "limsup seminorm on ℓ∞", R"j({
  "name": "example1",
  "description": "limsup seminorm on l-infinity: basis derivatives exist at 0 but the direction (1,1,...) has none",
  "space": {"kind": "ellinf"},
  "task": "gateaux",
  "function": {"kind": "limsup"},
  "point": {"prefix": [], "tail": {"kind": "zero"}},
  "directions": [{"prefix": [], "tail": {"kind": "const", "c": 1}}],
  "expected": {"verdict": "FAILS", "witness": {"type": "direction", "left": -1, "right": 1}}
})j"},
        {"example3", "limsup plus weighted quadratic on ℓ∞, minimizer (1/(2n))", R"j({
  "name": "example3",
  "description": "p(x) + sum beta^n (x_n^2 - x_n / n) on l-infinity at x = (1/(2n))",
  "space": {"kind": "ellinf"},
  "task": "certify_min",
  "function": {"kind": "sum", "terms": [
    {"kind": "limsup"},
    {"kind": "separable", "weight": {"kind": "geometric", "c": 1, "r": "beta"},
     "inner": {"kind": "affine_quad", "a": 1, "b": {"kind": "harmonic", "c": -1}}}]},
  "point": {"prefix": [], "tail": {"kind": "harmonic", "c": 0.5}},
  "parameters": {"beta": 0.5},
  "expected": {"verdict": "HOLDS"}
})j"},
        {"example4", "weighted sqrt objective on positive cone", R"j({
  "name": "example4",
  "description": "sum x_n - 2 sum beta^n sqrt(x_n) over the positive cone of l1 at x = (beta^(2n))",
  "space": {"kind": "ell1"},
  "task": "certify_min",
  "set": "positive_cone_ell1",
  "function": {"kind": "sum", "terms": [
    {"kind": "separable", "weight": {"kind": "const", "c": 1}, "inner": {"kind": "linear", "b": {"kind": "const", "c": 1}}},
    {"kind": "separable", "weight": {"kind": "geometric", "c": 2, "r": "beta"}, "inner": {"kind": "neg_sqrt", "c": 1}}]},
  "point": {"prefix": [], "tail": {"kind": "geometric", "c": 1, "r": "beta^2"}},
  "parameters": {"beta": 0.5},
  "expected": {"verdict": "HOLDS"}
})j"},
        {"example5", "limsup plus weighted quadratic where pseudo-semicontinuity fails", R"j({
  "name": "example5",
  "description": "p(x) + sum beta^n (x_n^2 - 2 x_n) at x = (1,1,...): stationary but not minimal",
  "space": {"kind": "ellinf"},
  "task": "certify_min",
  "function": {"kind": "sum", "terms": [
    {"kind": "limsup"},
    {"kind": "separable", "weight": {"kind": "geometric", "c": 1, "r": "beta"},
     "inner": {"kind": "affine_quad", "a": 1, "b": {"kind": "const", "c": -2}}}]},
  "point": {"prefix": [], "tail": {"kind": "const", "c": 1}},
  "parameters": {"beta": 0.5},
  "expected": {"verdict": "FAILS", "witness": {"type": "probe", "label": "half"}}
})j"},
        {"l1norm", "ℓ¹ norm at e₁, not differentiable along e₂", R"j({
  "name": "l1norm",
  "description": "l1 norm at e_1: the zero coordinate n = 2 blocks differentiability",
  "space": {"kind": "ell1"},
  "task": "gateaux",
  "function": {"kind": "l1norm"},
  "point": {"prefix": [1], "tail": {"kind": "zero"}},
  "expected": {"verdict": "FAILS", "witness": {"type": "coordinate", "n": 2}}
})j"},
    };
    return list;
}

inline const Builtin* find_builtin(const std::string& name) {
    for (const auto& b : builtins())
        if (name == b.name) return &b;
    return nullptr;
}

/// "name: description" lines in alphabetical order.
inline std::vector<std::string> list_builtins() {
    std::vector<std::string> out;
    for (const auto& b : builtins()) out.push_back(std::string(b.name) + ": " + b.description);
    std::sort(out.begin(), out.end());
    return out;
}

inline Scenario builtin_scenario(const std::string& name) {
    const auto* b = find_builtin(name);
    if (!b) throw InvalidArgument("unknown builtin scenario \"" + name + "\"");
    return parse_scenario(json::parse(b->json_text));
}

// ---- running ----

/// Command-line overrides of scenario parameters.
struct RunOverrides {
    std::optional<double> tol;
    std::optional<std::size_t> coords;
    std::optional<std::size_t> psc_depth;
    std::optional<std::vector<std::size_t>> oracle_k;
    std::uint64_t seed = 42;
    DerivOptions deriv;
};

struct OracleRun {
    std::size_t k = 0;
    std::optional<double> value;
    std::vector<double> minimizer;
    std::string error;
};

struct Report {
    std::string scenario;
    Task task = Task::CertifyMin;
    std::optional<Certificate> certificate;
    std::vector<OracleRun> oracle;
    std::optional<double> objective_value;
    std::vector<std::string> warnings;
    std::string error;
    std::optional<Expectation> expected;
    bool match = true;
    double seconds = 0.0;  // wall time; human output only
};

namespace detail {

inline bool json_subset(const json& want, const json& got) {
    if (want.is_object()) {
        if (!got.is_object()) return false;
        for (auto it = want.begin(); it != want.end(); ++it) {
            const auto g = got.find(it.key());
            if (g == got.end() || !json_subset(*it, *g)) return false;
        }
        return true;
    }
    if (want.is_number() && got.is_number())
        return std::abs(want.get<double>() - got.get<double>()) <= 1e-7 * std::max(1.0, std::abs(want.get<double>()));
    return want == got;
}

inline std::vector<OracleRun> run_oracle(const Scenario& s, const FunctionExpr& f, const ConstraintSet& cs,
                                         const std::vector<std::size_t>& ks) {
    std::vector<OracleRun> out;
    for (std::size_t k : ks) {
        OracleRun r{k, std::nullopt, {}, ""};
        try {
            const ReducedProblem rp(f, s.set, *s.point, k, cs);
            const auto m = minimize_reduced(rp);
            r.value = m.value;
            r.minimizer = m.y;
        } catch (const Error& e) {
            r.error = e.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace detail

inline CertifyOptions certify_options(const Scenario& s, const RunOverrides& o) {
    CertifyOptions c;
    c.space = s.space;
    c.tol = o.tol.value_or(s.parameters.tol);
    c.coords = o.coords.value_or(s.parameters.coords);
    c.psc_depth = o.psc_depth.value_or(s.parameters.psc_depth);
    c.probes = s.probes;
    c.seed = o.seed;
    c.deriv = o.deriv;
    return c;
}

inline Report run_scenario(const Scenario& s, const RunOverrides& o = {}) {
    const auto start = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = s.name;
    rep.task = s.task;
    rep.expected = s.expected;
    if (s.parameters.beta >= 2.0 / 3.0)
        rep.warnings.push_back("beta >= 2/3: the sum of beta^n is at least 2");
    const auto opts = certify_options(s, o);
    const auto ks = o.oracle_k.value_or(s.parameters.oracle_k);
    try {
        switch (s.task) {
        case Task::CertifyMin: {
            rep.certificate = certify_min(*s.function, s.set, *s.point, opts);
            rep.objective_value = evaluate(*s.function, *s.point, opts.series_tol).value;
            rep.oracle = detail::run_oracle(s, *s.function, {}, ks);
            break;
        }
        case Task::Gateaux:
            rep.certificate = gateaux_detect(*s.function, *s.point, opts, s.directions).certificate;
            break;
        case Task::Subgradient:
            rep.certificate = subgradient_test(*s.function, *s.point, *s.dual, opts);
            break;
        case Task::Kkt: {
            const KktProblem prob{*s.function, s.inequalities, s.equalities, s.set};
            rep.certificate = kkt_certify(prob, *s.point, s.lambda, s.nu, opts);
            rep.objective_value = evaluate(*s.function, *s.point, opts.series_tol).value;
            ConstraintSet cs{s.inequalities, s.equalities, 1e-10};
            rep.oracle = detail::run_oracle(s, *s.function, cs, ks);
            break;
        }
        case Task::Psc:
            rep.certificate = check_psc(*s.function, s.set, *s.point, probe_set(s.set, *s.point, opts),
                                        opts.psc_depth, opts);
            break;
        case Task::Qualification:
            rep.certificate = check_qualification(s.set, *s.point, opts.coords);
            break;
        case Task::SeriesDiff: {
            const auto family = s.family ? TermFamily::of_series(*s.family) : TermFamily::list(s.terms);
            auto r = series_differentiate(family, *s.point, s.radii, opts);
            rep.certificate = std::move(r.certificate);
            break;
        }
        case Task::DirProfile: {
            const auto prof = dir_deriv_profile(*s.function, *s.point, opts.coords, opts.deriv);
            Certificate c;
            c.grade = Grade::numeric_first_n(opts.coords);
            c.verdict = Verdict::Holds;
            c.reason = "derivative exists along every checked basis direction";
            for (std::size_t i = 0; i < prof.size(); ++i) {
                const auto& d = prof[i];
                c.coordinates.push_back({i + 1, d.left, d.right, d.exists, d.value, d.method});
                if (!d.exists && c.verdict == Verdict::Holds) {
                    c.verdict = Verdict::Fails;
                    c.reason = "no derivative along e_" + std::to_string(i + 1);
                    c.witness = detail::coordinate_witness(c.coordinates.back());
                }
            }
            rep.certificate = std::move(c);
            break;
        }
        }
    } catch (const Error& e) {
        rep.error = e.what();
    }
    if (rep.error.empty() && rep.expected) {
        rep.match = to_string(rep.certificate->verdict) == rep.expected->verdict &&
                    detail::json_subset(rep.expected->witness, rep.certificate->witness);
    } else if (!rep.error.empty()) {
        rep.match = false;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

/// Runs independent scenarios concurrently; results keep the input order.
inline std::vector<Report> run_batch(const std::vector<Scenario>& scenarios, const RunOverrides& o = {}) {
    std::vector<std::future<Report>> jobs;
    for (const auto& s : scenarios) jobs.push_back(std::async(std::launch::async, [&s, &o] { return run_scenario(s, o); }));
    std::vector<Report> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

inline json to_json(const Report& r) {
    json out = {{"scenario", r.scenario}, {"task", to_string(r.task)}};
    if (!r.error.empty()) {
        out["error"] = r.error;
    } else {
        out["verdict"] = to_string(r.certificate->verdict);
        out["grade"] = r.certificate->grade.to_string();
        out["certificate"] = to_json(*r.certificate);
    }
    if (r.objective_value) out["objective_value"] = number_json(*r.objective_value);
    if (!r.oracle.empty()) {
        json o = json::array();
        for (const auto& run : r.oracle) {
            json e = {{"k", run.k}};
            if (run.value) {
                e["value"] = number_json(*run.value);
                e["minimizer"] = run.minimizer;
                if (r.objective_value) e["difference"] = number_json(*run.value - *r.objective_value);
            } else {
                e["error"] = run.error;
            }
            o.push_back(e);
        }
        out["oracle"] = o;
    }
    out["warnings"] = r.warnings;
    if (r.expected) {
        out["expected"] = {{"verdict", r.expected->verdict}};
        if (!r.expected->witness.empty()) out["expected"]["witness"] = r.expected->witness;
    }
    out["match"] = r.match;
    return out;
}

/// Human-readable summary (includes wall time, which the JSON report omits).
inline std::string format_report(const Report& r, std::size_t max_rows = 8) {
    std::ostringstream os;
    os << r.scenario << ": " << to_string(r.task) << " ";
    if (!r.error.empty()) {
        os << "ERROR " << r.error << "\n";
        return os.str();
    }
    const auto& c = *r.certificate;
    os << to_string(c.verdict) << " [" << c.grade.to_string() << "]";
    if (r.expected) os << " expected " << r.expected->verdict << (r.match ? " (match)" : " (MISMATCH)");
    os << "\n";
    if (!c.reason.empty()) os << "  reason: " << c.reason << "\n";
    if (r.objective_value) os << "  f(x*) = " << *r.objective_value << "\n";
    if (!c.witness.empty()) os << "  witness: " << c.witness.dump() << "\n";
    if (!c.coordinates.empty()) {
        os << "  " << std::left << std::setw(5) << "n" << std::setw(24) << "f'(x*;e_n)" << "method\n";
        for (std::size_t i = 0; i < c.coordinates.size() && i < max_rows; ++i) {
            const auto& rec = c.coordinates[i];
            std::ostringstream cell;
            if (rec.exists) cell << rec.value;
            else cell << "[" << rec.left << ", " << rec.right << "]";
            os << "  " << std::setw(5) << rec.n << std::setw(24) << cell.str() << to_string(rec.method) << "\n";
        }
        os << std::right;
        if (c.coordinates.size() > max_rows) os << "  ... " << c.coordinates.size() - max_rows << " more\n";
    }
    for (const auto& run : r.oracle) {
        os << "  oracle k=" << run.k << ": ";
        if (run.value) os << *run.value;
        else os << "error: " << run.error;
        os << "\n";
    }
    for (const auto& w : r.warnings) os << "  warning: " << w << "\n";
    os << "  time: " << r.seconds * 1e3 << " ms\n";
    return os.str();
}

} // namespace seqcert
