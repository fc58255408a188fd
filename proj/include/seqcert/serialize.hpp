#pragma once

// JSON encoding of points, spaces, sets and function expressions.
//
// Decoding is strict: unknown fields and wrong types raise ParseError with
// the JSON path of the offending value. Numeric fields may also be written
// as expressions in the scenario parameter beta ("beta", "-beta",
// "2*beta", "beta^2").

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <regex>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqcert/error.hpp"
#include "seqcert/funcs.hpp"
#include "seqcert/seqspace.hpp"
#include "seqcert/sets.hpp"

namespace seqcert {

using json = nlohmann::json;

struct ParseContext {
    double beta = 0.5;
    std::string path = "";

    ParseContext at(const std::string& key) const { return {beta, path + "/" + key}; }
    ParseContext at(std::size_t i) const { return {beta, path + "/" + std::to_string(i)}; }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError((path.empty() ? std::string("/") : path) + ": " + what);
    }
};

namespace detail {

inline void require_object(const json& j, const ParseContext& ctx, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) ctx.fail("expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) ctx.at(it.key()).fail("unknown field");
    }
}

inline const json& field(const json& j, const char* key, const ParseContext& ctx) {
    const auto it = j.find(key);
    if (it == j.end()) ctx.fail(std::string("missing field \"") + key + "\"");
    return *it;
}

inline std::string parse_string(const json& j, const ParseContext& ctx) {
    if (!j.is_string()) ctx.fail("expected a string");
    return j.get<std::string>();
}

} // namespace detail

/// A number, or an expression "[-][k*]beta[^m]".
inline double parse_number(const json& j, const ParseContext& ctx) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) ctx.fail("expected a number");
    static const std::regex expr(R"(^\s*(-)?\s*(?:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?beta(?:\s*\^\s*([0-9]+))?\s*$)");
    const std::string s = j.get<std::string>();
    std::smatch m;
    if (!std::regex_match(s, m, expr)) ctx.fail("cannot read \"" + s + "\" as a number");
    double v = ctx.beta;
    if (m[3].matched) v = std::pow(ctx.beta, std::stod(m[3].str()));
    if (m[2].matched) v *= std::stod(m[2].str());
    if (m[1].matched) v = -v;
    return v;
}

inline std::size_t parse_index(const json& j, const ParseContext& ctx) {
    if (!j.is_number_unsigned()) ctx.fail("expected a non-negative integer");
    return j.get<std::size_t>();
}

// ---- TailRule ----

inline json to_json(const TailRule& t) {
    switch (t.kind) {
    case TailRule::Kind::Zero: return {{"kind", "zero"}};
    case TailRule::Kind::Const: return {{"kind", "const"}, {"c", t.c}};
    case TailRule::Kind::Geometric: return {{"kind", "geometric"}, {"c", t.c}, {"r", t.r}};
    case TailRule::Kind::Harmonic: return {{"kind", "harmonic"}, {"c", t.c}};
    }
    return {};
}

inline TailRule parse_tail_rule(const json& j, const ParseContext& ctx) {
    if (!j.is_object()) ctx.fail("expected a tail rule object");
    const std::string kind = detail::parse_string(detail::field(j, "kind", ctx), ctx.at("kind"));
    try {
        if (kind == "zero") {
            detail::require_object(j, ctx, {"kind"});
            return TailRule::zero();
        }
        if (kind == "const") {
            detail::require_object(j, ctx, {"kind", "c"});
            return TailRule::constant(parse_number(detail::field(j, "c", ctx), ctx.at("c")));
        }
        if (kind == "geometric") {
            detail::require_object(j, ctx, {"kind", "c", "r"});
            return TailRule::geometric(parse_number(detail::field(j, "c", ctx), ctx.at("c")),
                                       parse_number(detail::field(j, "r", ctx), ctx.at("r")));
        }
        if (kind == "harmonic") {
            detail::require_object(j, ctx, {"kind", "c"});
            return TailRule::harmonic(parse_number(detail::field(j, "c", ctx), ctx.at("c")));
        }
    } catch (const InvalidArgument& e) {
        ctx.fail(e.what());
    }
    ctx.at("kind").fail("unknown tail rule \"" + kind + "\"");
}

// ---- Point / DualPoint ----

template <class Tag>
json to_json(const Sequence<Tag>& x) {
    json out = json::object();
    out["prefix"] = x.prefix();
    if (x.tail().empty()) {
        out["tail"] = to_json(TailRule::zero());
    } else if (x.tail().size() == 1) {
        out["tail"] = to_json(x.tail().front());
    } else {
        json atoms = json::array();
        for (const auto& t : x.tail()) atoms.push_back(to_json(t));
        out["tail"] = atoms;
    }
    return out;
}

template <class Tag>
Sequence<Tag> parse_sequence(const json& j, const ParseContext& ctx) {
    detail::require_object(j, ctx, {"prefix", "tail"});
    std::vector<double> prefix;
    if (const auto it = j.find("prefix"); it != j.end()) {
        if (!it->is_array()) ctx.at("prefix").fail("expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) prefix.push_back(parse_number((*it)[i], ctx.at("prefix").at(i)));
    }
    std::vector<TailRule> tail{TailRule::zero()};
    if (const auto it = j.find("tail"); it != j.end()) {
        if (it->is_array()) {
            tail.clear();
            for (std::size_t i = 0; i < it->size(); ++i) tail.push_back(parse_tail_rule((*it)[i], ctx.at("tail").at(i)));
            if (tail.empty()) tail.push_back(TailRule::zero());
        } else {
            tail = {parse_tail_rule(*it, ctx.at("tail"))};
        }
    }
    return Sequence<Tag>(std::move(prefix), std::move(tail));
}

inline Point parse_point(const json& j, const ParseContext& ctx) { return parse_sequence<PrimalTag>(j, ctx); }
inline DualPoint parse_dual_point(const json& j, const ParseContext& ctx) { return parse_sequence<DualTag>(j, ctx); }

// ---- SpaceDescriptor ----

inline json to_json(const SpaceDescriptor& s) { return {{"kind", to_string(s.kind)}}; }

/// {"kind": "rn" | "ell1" | "ellinf"}, or the bare kind string.
inline SpaceDescriptor parse_space(const json& j, const ParseContext& ctx) {
    std::string k;
    if (j.is_string()) {
        k = j.get<std::string>();
    } else {
        detail::require_object(j, ctx, {"kind"});
        k = detail::parse_string(detail::field(j, "kind", ctx), ctx.at("kind"));
    }
    if (k == "rn") return SpaceDescriptor::rn();
    if (k == "ell1") return SpaceDescriptor::ell1();
    if (k == "ellinf") return SpaceDescriptor::ellinf();
    ctx.fail("unknown space \"" + k + "\" (expected rn, ell1 or ellinf)");
}

// ---- SetDescriptor ----

inline json to_json(const SetDescriptor& s) {
    if (s.kind == SetDescriptor::Kind::Box)
        return {{"kind", "box"}, {"lower", to_json(s.lower)}, {"upper", to_json(s.upper)}};
    return to_string(s.kind);
}

inline SetDescriptor parse_set(const json& j, const ParseContext& ctx) {
    if (j.is_string()) {
        const std::string k = j.get<std::string>();
        if (k == "whole") return SetDescriptor::whole_space();
        if (k == "positive_cone_ell1") return SetDescriptor::positive_cone_ell1();
        ctx.fail("unknown set \"" + k + "\"");
    }
    detail::require_object(j, ctx, {"kind", "lower", "upper"});
    const std::string k = detail::parse_string(detail::field(j, "kind", ctx), ctx.at("kind"));
    if (k != "box") ctx.at("kind").fail("unknown set \"" + k + "\"");
    return SetDescriptor::box(parse_point(detail::field(j, "lower", ctx), ctx.at("lower")),
                              parse_point(detail::field(j, "upper", ctx), ctx.at("upper")));
}

// ---- FunctionExpr ----

inline json to_json(const ScalarConvex& u) {
    json out = {{"kind", to_string(u.kind)}};
    switch (u.kind) {
    case ScalarConvex::Kind::AffineQuad:
        out["a"] = u.a;
        out["b"] = to_json(u.b);
        break;
    case ScalarConvex::Kind::NegSqrt: out["c"] = u.c; break;
    case ScalarConvex::Kind::Linear: out["b"] = to_json(u.b); break;
    default: break;
    }
    return out;
}

inline ScalarConvex parse_scalar(const json& j, const ParseContext& ctx) {
    if (!j.is_object()) ctx.fail("expected an object");
    const std::string k = detail::parse_string(detail::field(j, "kind", ctx), ctx.at("kind"));
    try {
        if (k == "abs" || k == "square") {
            detail::require_object(j, ctx, {"kind"});
            return k == "abs" ? ScalarConvex::abs() : ScalarConvex::square();
        }
        if (k == "affine_quad") {
            detail::require_object(j, ctx, {"kind", "a", "b"});
            return ScalarConvex::affine_quad(parse_number(detail::field(j, "a", ctx), ctx.at("a")),
                                             parse_tail_rule(detail::field(j, "b", ctx), ctx.at("b")));
        }
        if (k == "neg_sqrt") {
            detail::require_object(j, ctx, {"kind", "c"});
            return ScalarConvex::neg_sqrt(parse_number(detail::field(j, "c", ctx), ctx.at("c")));
        }
        if (k == "linear") {
            detail::require_object(j, ctx, {"kind", "b"});
            return ScalarConvex::linear(parse_tail_rule(detail::field(j, "b", ctx), ctx.at("b")));
        }
    } catch (const InvalidArgument& e) {
        ctx.fail(e.what());
    }
    ctx.at("kind").fail("unknown scalar function \"" + k + "\"");
}

inline json to_json(const FunctionExpr& f) {
    if (f.as<LimsupSeminorm>()) return {{"kind", "limsup"}};
    if (const auto* s = f.as<SeparableSeries>()) {
        json out = {{"kind", "separable"}, {"weight", to_json(s->weight)}, {"inner", to_json(s->inner)}};
        if (s->first != 1) out["first"] = s->first;
        if (s->last != 0) out["last"] = s->last;
        return out;
    }
    if (const auto* a = f.as<AffineFunctional>()) {
        json out = {{"kind", "linear"}, {"p", to_json(a->p)}};
        if (a->offset != 0.0) out["offset"] = a->offset;
        return out;
    }
    if (const auto* sum = f.as<SumExpr>()) {
        json terms = json::array();
        for (const auto& t : sum->terms) terms.push_back(to_json(t));
        return {{"kind", "sum"}, {"terms", terms}};
    }
    const auto* sc = f.as<ScaleExpr>();
    return {{"kind", "scale"}, {"lambda", sc->lambda}, {"f", to_json(sc->f)}};
}

inline FunctionExpr parse_function(const json& j, const ParseContext& ctx) {
    if (!j.is_object()) ctx.fail("expected a function object");
    const std::string k = detail::parse_string(detail::field(j, "kind", ctx), ctx.at("kind"));
    try {
        if (k == "limsup") {
            detail::require_object(j, ctx, {"kind"});
            return limsup_seminorm();
        }
        if (k == "l1norm") {
            detail::require_object(j, ctx, {"kind"});
            return l1_norm();
        }
        if (k == "separable") {
            detail::require_object(j, ctx, {"kind", "weight", "inner", "first", "last"});
            SeparableSeries s;
            s.weight = parse_tail_rule(detail::field(j, "weight", ctx), ctx.at("weight"));
            s.inner = parse_scalar(detail::field(j, "inner", ctx), ctx.at("inner"));
            if (j.contains("first")) s.first = parse_index(j["first"], ctx.at("first"));
            if (j.contains("last")) s.last = parse_index(j["last"], ctx.at("last"));
            return s;
        }
        if (k == "linear") {
            detail::require_object(j, ctx, {"kind", "p", "offset"});
            const double offset = j.contains("offset") ? parse_number(j["offset"], ctx.at("offset")) : 0.0;
            return affine(parse_dual_point(detail::field(j, "p", ctx), ctx.at("p")), offset);
        }
        if (k == "sum") {
            detail::require_object(j, ctx, {"kind", "terms"});
            const json& terms = detail::field(j, "terms", ctx);
            if (!terms.is_array()) ctx.at("terms").fail("expected an array");
            std::vector<FunctionExpr> fs;
            for (std::size_t i = 0; i < terms.size(); ++i) fs.push_back(parse_function(terms[i], ctx.at("terms").at(i)));
            return combine_sum(std::move(fs));
        }
        if (k == "scale") {
            detail::require_object(j, ctx, {"kind", "lambda", "f"});
            return scale(parse_number(detail::field(j, "lambda", ctx), ctx.at("lambda")),
                         parse_function(detail::field(j, "f", ctx), ctx.at("f")));
        }
    } catch (const InvalidArgument& e) {
        ctx.fail(e.what());
    } catch (const NegativeScale& e) {
        ctx.fail(e.what());
    }
    ctx.at("kind").fail("unknown function \"" + k + "\"");
}

} // namespace seqcert
