// Command-line front end: loads function documents, runs the evaluation,
// subgradient, interval, membership, Clarke-sampling, convexity-falsification
// and example commands, and prints one JSON report per invocation.
//
// Exit codes: 0 on success (including NotFalsified / VerifiedExact verdicts),
// 2 when a check is Falsified or an example fact fails, 1 on usage or
// document errors.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "matconv/matconv.hpp"

namespace {

using nlohmann::json;

std::vector<double> parse_point(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::size_t end = comma == std::string::npos ? text.size() : comma;
        std::string tok = text.substr(pos, end - pos);
        const auto first = tok.find_first_not_of(" \t");
        if (first == std::string::npos)
            throw matconv::ParseError("empty coordinate in point '" + text + "'", "-x");
        const auto last = tok.find_last_not_of(" \t");
        tok = tok.substr(first, last - first + 1);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw matconv::ParseError("cannot parse coordinate '" + tok + "'", "-x");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw matconv::ParseError("point is empty", "-x");
    return out;
}

struct Options {
    std::string function_path;
    std::string candidate_path;
    std::string point_text;
    std::string example_name;
    long budget = 1000;
    std::uint64_t seed = 0;
    int samples = 100;
    double radius = 1e-3;
    double psd_tol = matconv::kDefaultPsdTol;
    double diff_tol = matconv::kDefaultDiffTol;
    bool pretty = false;
};

int run(int argc, char** argv) {
    Options opt;
    CLI::App app{"convex matrix-valued functions: evaluation, subgradients, and checking"};
    app.require_subcommand(1);

    auto add_function = [&](CLI::App* cmd) {
        cmd->add_option("-f,--function", opt.function_path, "function document (JSON)")->required();
    };
    auto add_point = [&](CLI::App* cmd) {
        cmd->add_option("-x,--point", opt.point_text, "evaluation point, comma-separated")->required();
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", opt.seed, "random seed");
    };
    app.add_flag("--pretty", opt.pretty, "indent the report");
    app.add_option("--tol", opt.psd_tol, "semidefinite tolerance");
    app.add_option("--diff-tol", opt.diff_tol, "smoothness tolerance");

    CLI::App* eval = app.add_subcommand("eval", "evaluate F(x)");
    add_function(eval);
    add_point(eval);

    CLI::App* subgrad = app.add_subcommand("subgrad", "forward subgradient with provenance");
    add_function(subgrad);
    add_point(subgrad);

    CLI::App* interval = app.add_subcommand("interval", "one-sided derivative interval (univariate)");
    add_function(interval);
    add_point(interval);

    CLI::App* check = app.add_subcommand("check", "test a subgradient candidate");
    add_function(check);
    add_point(check);
    check->add_option("-V,--candidate", opt.candidate_path, "candidate document (JSON)")->required();
    check->add_option("--budget", opt.budget, "sampling budget");
    add_seed(check);

    CLI::App* clarke = app.add_subcommand("clarke", "sample Clarke generators near x");
    add_function(clarke);
    add_point(clarke);
    clarke->add_option("-n,--samples", opt.samples, "number of draws");
    clarke->add_option("-r,--radius", opt.radius, "sampling radius");
    add_seed(clarke);

    CLI::App* falsify = app.add_subcommand("falsify-convexity", "search for a convexity violation");
    add_function(falsify);
    falsify->add_option("--budget", opt.budget, "sampling budget");
    add_seed(falsify);

    CLI::App* repro = app.add_subcommand("repro", "run a named example's fact list");
    repro->add_option("--name", opt.example_name, "example name")->required();

    falsify->parse_complete_callback([&] {
        if (falsify->count("--budget") == 0) opt.budget = 10000;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    json report;
    report["tolerances"] = {{"psd_tol", opt.psd_tol}, {"diff_tol", opt.diff_tol}};
    report["seed"] = opt.seed;
    json inputs;
    int exit_code = 0;
    const auto started = std::chrono::steady_clock::now();

    try {
        if (app.got_subcommand(eval)) {
            report["command"] = "eval";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            const std::vector<double> x = parse_point(opt.point_text);
            inputs = {{"function", opt.function_path}, {"x", x}};
            report["result"] = {{"matrix", matconv::to_json(matconv::evaluate(f, x))}};
        } else if (app.got_subcommand(subgrad)) {
            report["command"] = "subgrad";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            const std::vector<double> x = parse_point(opt.point_text);
            inputs = {{"function", opt.function_path}, {"x", x}};
            const matconv::SubgradientCert cert = matconv::subgradient(f, x);
            report["result"] = {{"matrices", matconv::to_json(cert.value)},
                                {"provenance", matconv::to_json(cert.provenance)}};
        } else if (app.got_subcommand(interval)) {
            report["command"] = "interval";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            const std::vector<double> x = parse_point(opt.point_text);
            inputs = {{"function", opt.function_path}, {"x", x}};
            if (x.size() != 1)
                throw matconv::NotUnivariate("interval needs a single coordinate, got " +
                                             std::to_string(x.size()));
            report["result"] = matconv::to_json(matconv::subdiff_interval_1d(f, x[0]));
        } else if (app.got_subcommand(check)) {
            report["command"] = "check";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            const std::vector<double> x = parse_point(opt.point_text);
            const matconv::MatTuple v =
                matconv::load_candidate(opt.candidate_path, f->input_dim(), f->output_dim());
            inputs = {{"function", opt.function_path},
                      {"x", x},
                      {"candidate", opt.candidate_path},
                      {"budget", opt.budget}};
            const matconv::Verdict verdict =
                matconv::check_subgradient(f, x, v, opt.budget, opt.seed, opt.psd_tol);
            report["result"] = matconv::to_json(verdict);
            if (verdict.outcome == matconv::Outcome::Falsified) exit_code = 2;
        } else if (app.got_subcommand(clarke)) {
            report["command"] = "clarke";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            const std::vector<double> x = parse_point(opt.point_text);
            inputs = {{"function", opt.function_path},
                      {"x", x},
                      {"n", opt.samples},
                      {"r", opt.radius}};
            const std::vector<matconv::MatTuple> gens =
                matconv::clarke_sample(f, x, opt.samples, opt.radius, opt.seed, opt.diff_tol);
            json list = json::array();
            for (const matconv::MatTuple& g : gens) list.push_back(matconv::to_json(g));
            report["result"] = {{"count", gens.size()}, {"generators", std::move(list)}};
        } else if (app.got_subcommand(falsify)) {
            report["command"] = "falsify-convexity";
            const matconv::ExprPtr f = matconv::load_function_spec(opt.function_path);
            inputs = {{"function", opt.function_path}, {"budget", opt.budget}};
            const auto witness = matconv::falsify_convexity(f, opt.budget, opt.seed, opt.psd_tol);
            if (witness) {
                report["result"] = {{"falsified", true}, {"witness", matconv::to_json(*witness)}};
                exit_code = 2;
            } else {
                report["result"] = {{"falsified", false}, {"samples", opt.budget}};
            }
        } else {
            report["command"] = "repro";
            const matconv::ExampleCase ex = matconv::build_example(opt.example_name);
            inputs = {{"name", opt.example_name}};
            json facts = json::array();
            bool all_pass = true;
            for (const matconv::Fact& fact : ex.facts) {
                const bool pass = fact.check();
                all_pass = all_pass && pass;
                facts.push_back({{"description", fact.description}, {"pass", pass}});
            }
            report["result"] = {{"name", ex.name}, {"facts", std::move(facts)}, {"all_pass", all_pass}};
            if (!all_pass) exit_code = 2;
        }
    } catch (const matconv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const auto elapsed = std::chrono::steady_clock::now() - started;
    report["inputs"] = std::move(inputs);
    report["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
    std::cout << (opt.pretty ? report.dump(2) : report.dump()) << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
