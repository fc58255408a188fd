#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "seqcert/scenario.hpp"

using namespace seqcert;

TEST(Scenario, BuiltinsListedAlphabetically) {
    const auto names = list_builtins();
    EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
    EXPECT_NE(std::find(names.begin(), names.end(), "example1: limsup seminorm on ℓ∞"), names.end());
    EXPECT_NE(std::find(names.begin(), names.end(), "example4: weighted sqrt objective on positive cone"), names.end());
}

TEST(Scenario, BuiltinsRoundTrip) {
    for (const auto& b : builtins()) {
        const auto s = builtin_scenario(b.name);
        EXPECT_EQ(parse_scenario(to_json(s)), s) << b.name;
    }
}

TEST(Scenario, BuiltinsMatchExpectations) {
    for (const auto& b : builtins()) {
        const auto r = run_scenario(builtin_scenario(b.name));
        EXPECT_TRUE(r.error.empty()) << b.name << ": " << r.error;
        EXPECT_TRUE(r.match) << b.name << "\n" << format_report(r);
    }
}

TEST(Scenario, BuiltinMinimumRunsOracle) {
    const auto r = run_scenario(builtin_scenario("example3"));
    ASSERT_TRUE(r.certificate);
    EXPECT_TRUE(r.certificate->holds());
    ASSERT_EQ(r.oracle.size(), 4u);
    for (const auto& o : r.oracle) {
        ASSERT_TRUE(o.value);
        EXPECT_NEAR(*o.value, *r.objective_value, 1e-6);
    }
}

TEST(Scenario, DeterministicJson) {
    for (const auto& b : builtins()) {
        const auto a = to_json(run_scenario(builtin_scenario(b.name))).dump();
        const auto c = to_json(run_scenario(builtin_scenario(b.name))).dump();
        EXPECT_EQ(a, c) << b.name;
    }
}

TEST(Scenario, BatchPreservesOrder) {
    std::vector<Scenario> list;
    for (const char* n : {"l1norm", "example1", "example5", "example3"}) list.push_back(builtin_scenario(n));
    const auto reports = run_batch(list);
    ASSERT_EQ(reports.size(), list.size());
    for (std::size_t i = 0; i < list.size(); ++i) EXPECT_EQ(reports[i].scenario, list[i].name);
}

TEST(Scenario, UnknownFieldRejected) {
    auto j = to_json(builtin_scenario("example3"));
    j["colour"] = "red";
    EXPECT_THROW(parse_scenario(j), ParseError);
}

TEST(Scenario, ParseErrorReportsLine) {
    const std::string text = "{\n  \"name\": \"x\",\n  \"task\": \"gateaux\"\n  \"space\": \"ell1\"\n}";
    try {
        parse_json_text(text, "bad.json");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("bad.json:4"), std::string::npos) << e.what();
    }
}

TEST(Scenario, FieldErrorReportsPath) {
    auto j = to_json(builtin_scenario("example3"));
    j["function"]["terms"][1]["weight"]["r"] = "gamma";
    try {
        parse_scenarios(j, "s.json");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/function/terms/1/weight/r"), std::string::npos) << e.what();
    }
}

TEST(Scenario, LargeBetaIsFlagged) {
    auto j = to_json(builtin_scenario("example3"));
    j["parameters"]["beta"] = 0.7;
    const auto r = run_scenario(parse_scenario(j));
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Scenario, ShippedScenarioFilesMatch) {
    const std::filesystem::path dir = std::filesystem::path(SEQCERT_SOURCE_DIR) / "scenarios";
    std::size_t files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        ++files;
        std::ifstream in(entry.path());
        std::stringstream buf;
        buf << in.rdbuf();
        for (const auto& s : parse_scenarios(parse_json_text(buf.str(), entry.path().string()), entry.path().string())) {
            const auto r = run_scenario(s);
            EXPECT_TRUE(r.error.empty()) << s.name << ": " << r.error;
            EXPECT_TRUE(r.match) << s.name << "\n" << format_report(r);
        }
    }
    EXPECT_GT(files, 0u);
}
