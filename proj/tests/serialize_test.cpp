#include <gtest/gtest.h>

#include "seqcert/serialize.hpp"

using namespace seqcert;

TEST(Serialize, BetaExpressions) {
    const ParseContext ctx{0.5, ""};
    EXPECT_EQ(parse_number(json("beta"), ctx), 0.5);
    EXPECT_EQ(parse_number(json("beta^2"), ctx), 0.25);
    EXPECT_EQ(parse_number(json("-3*beta^3"), ctx), -0.375);
    EXPECT_EQ(parse_number(json(1.5), ctx), 1.5);
    EXPECT_THROW(parse_number(json("gamma"), ctx), ParseError);
}

TEST(Serialize, PointRoundTrip) {
    const Point x({1.0, -2.0}, std::vector<TailRule>{TailRule::geometric(1.0, 0.5), TailRule::harmonic(2.0)});
    EXPECT_EQ(parse_point(to_json(x), {}), x);
    EXPECT_EQ(parse_point(to_json(Point::zero()), {}), Point::zero());
}

TEST(Serialize, FunctionRoundTrip) {
    const auto f = combine_sum({limsup_seminorm(),
                                scale(2.0, separable(TailRule::geometric(1.0, 0.5),
                                                     ScalarConvex::affine_quad(1.0, TailRule::harmonic(-1.0)))),
                                affine(DualPoint({1.0}, TailRule::geometric(0.5, 0.25)), 3.0),
                                separable(TailRule::constant(2.0), ScalarConvex::neg_sqrt(1.5))});
    EXPECT_EQ(parse_function(to_json(f), {}), f);
    EXPECT_EQ(parse_function(json::parse(R"({"kind": "l1norm"})"), {}), l1_norm());
}

TEST(Serialize, SetsAndSpaces) {
    const auto box = SetDescriptor::box(Point({}, TailRule::constant(-1.0)), Point({}, TailRule::constant(1.0)));
    EXPECT_EQ(parse_set(to_json(box), {}), box);
    EXPECT_EQ(parse_set(json("positive_cone_ell1"), {}), SetDescriptor::positive_cone_ell1());
    EXPECT_EQ(parse_space(json("ell1"), {}).kind, SpaceKind::Ell1);
    EXPECT_EQ(parse_space(json::parse(R"({"kind": "rn"})"), {}).kind, SpaceKind::RN);
}

TEST(Serialize, UnknownFieldReportsPath) {
    const auto j = json::parse(R"({"kind": "sum", "terms": [{"kind": "limsup", "extra": 1}]})");
    try {
        parse_function(j, {});
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/terms/0/extra"), std::string::npos) << e.what();
    }
}

TEST(Serialize, InvalidValuesRejected) {
    EXPECT_THROW(parse_tail_rule(json::parse(R"({"kind": "geometric", "c": 1, "r": 1.5})"), {}), Error);
    EXPECT_THROW(parse_function(json::parse(R"({"kind": "scale", "lambda": -1, "f": {"kind": "limsup"}})"), {}),
                 Error);
    EXPECT_THROW(parse_function(json::parse(R"({"kind": "nope"})"), {}), ParseError);
}
