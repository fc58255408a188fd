// seqcert: run certification scenarios from JSON files or the builtin set.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqcert/scenario.hpp"

namespace {

std::vector<seqcert::Scenario> load(const std::string& arg) {
    if (seqcert::find_builtin(arg)) return {seqcert::builtin_scenario(arg)};
    std::ifstream in(arg);
    if (!in) throw seqcert::InvalidArgument("no builtin or readable file named \"" + arg + "\"");
    std::stringstream buf;
    buf << in.rdbuf();
    return seqcert::parse_scenarios(seqcert::parse_json_text(buf.str(), arg), arg);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify optimality and differentiability of convex functions on sequence spaces"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run scenario files or builtin scenarios");
    std::vector<std::string> inputs;
    std::string json_path;
    seqcert::RunOverrides over;
    double tol = 0.0, t0 = 0.0, deriv_tol = 0.0;
    std::size_t coords = 0, psc_depth = 0, steps = 0;
    std::vector<std::size_t> oracle_k;
    bool quiet = false;
    run->add_option("scenarios", inputs, "Scenario files (object or array) or builtin names")->required();
    run->add_option("--json", json_path, "Write the JSON report here ('-' for stdout)");
    run->add_option("--seed", over.seed, "Seed for random probes")->capture_default_str();
    run->add_option("--tol", tol, "Derivative and probe tolerance");
    run->add_option("--coords", coords, "Number of basis directions N");
    run->add_option("--psc-depth", psc_depth, "Projection depth K for pseudo-semicontinuity probes");
    run->add_option("--oracle-k", oracle_k, "Truncation dimensions for the reduced-problem oracle");
    run->add_option("--deriv-t0", t0, "Initial step of numeric directional derivatives");
    run->add_option("--deriv-steps", steps, "Number of step halvings");
    run->add_option("--deriv-tol", deriv_tol, "Existence threshold |right - left|");
    run->add_flag("-q,--quiet", quiet, "Suppress the human-readable report");

    auto* list = app.add_subcommand("list", "List builtin scenarios");
    auto* show = app.add_subcommand("show", "Print a builtin scenario as JSON");
    std::string show_name;
    show->add_option("name", show_name, "Builtin name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& line : seqcert::list_builtins()) std::cout << line << "\n";
            return 0;
        }
        if (*show) {
            std::cout << seqcert::to_json(seqcert::builtin_scenario(show_name)).dump(2) << "\n";
            return 0;
        }

        if (tol > 0.0) over.tol = tol;
        if (coords > 0) over.coords = coords;
        if (psc_depth > 0) over.psc_depth = psc_depth;
        if (!oracle_k.empty()) over.oracle_k = oracle_k;
        if (t0 > 0.0) over.deriv.t0 = t0;
        if (steps > 0) over.deriv.steps = steps;
        if (deriv_tol > 0.0) over.deriv.tol_match = deriv_tol;

        std::vector<seqcert::Scenario> scenarios;
        for (const auto& in : inputs) {
            auto s = load(in);
            scenarios.insert(scenarios.end(), s.begin(), s.end());
        }
        const auto reports = seqcert::run_batch(scenarios, over);

        int code = 0;
        nlohmann::json out = nlohmann::json::array();
        for (const auto& r : reports) {
            if (!quiet) std::cout << seqcert::format_report(r);
            out.push_back(seqcert::to_json(r));
            if (!r.error.empty()) code = 2;
            else if (!r.match && code == 0) code = 1;
        }
        if (!json_path.empty()) {
            const std::string text = (reports.size() == 1 ? out[0] : out).dump(2) + "\n";
            if (json_path == "-") {
                std::cout << text;
            } else {
                std::ofstream f(json_path);
                if (!f) throw seqcert::InvalidArgument("cannot write " + json_path);
                f << text;
            }
        }
        return code;
    } catch (const seqcert::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
