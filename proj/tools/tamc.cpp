// Command-line front end: check queries, simulate runs, print the timing
// table and emit the model corpus.
//
// Exit codes: 0 success / all queries satisfied, 1 some query not satisfied,
// 2 usage, parse or runtime error.

#include "tamc/bufferlab.hpp"
#include "tamc/errors.hpp"
#include "tamc/modelspec.hpp"
#include "tamc/verifier.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

namespace {

using namespace tamc;

constexpr int kExitUnsatisfied = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SourceModel parse_model_file(const std::string& path) {
    auto r = parse_model(read_file(path));
    if (!r.ok()) {
        for (const auto& d : r.diagnostics) std::cerr << path << ":" << to_string(d) << "\n";
        throw Error("failed to parse " + path);
    }
    return std::move(*r.value);
}

// ── Commands ────────────────────────────────────────────────────────────────

struct CheckArgs {
    std::string model;
    std::string queries;
    std::string trace;
    std::size_t budget = 1'000'000;
    std::size_t jobs = 1;
};

int cmd_check(const CheckArgs& a) {
    const Network n = to_network(parse_model_file(a.model));
    auto qr = parse_queries(read_file(a.queries));
    if (!qr.ok()) {
        for (const auto& d : qr.diagnostics) std::cerr << a.queries << ":" << to_string(d) << "\n";
        throw Error("failed to parse " + a.queries);
    }
    ExploreOptions opts;
    opts.budget = a.budget;
    opts.jobs = std::max<std::size_t>(1, a.jobs);

    bool all = true;
    auto report = nlohmann::ordered_json::array();
    for (const auto& q : *qr.value) {
        const Verdict v = check(n, q, opts);
        all = all && v.satisfied;
        std::cout << to_string(q) << ": " << (v.satisfied ? "SATISFIED" : "NOT SATISFIED")
                  << " (explored=" << v.stats.explored << " stored=" << v.stats.stored
                  << " max_waiting=" << v.stats.max_waiting << ")" << (v.zeno_caveat ? " [zeno runs not excluded]" : "")
                  << "\n";
        report.push_back(verdict_to_json(n, q, v));
    }
    if (!a.trace.empty()) {
        std::ofstream out(a.trace, std::ios::binary);
        if (!out) throw Error("cannot write " + a.trace);
        out << report.dump(2) << "\n";
    }
    return all ? 0 : kExitUnsatisfied;
}

int cmd_simulate(const std::string& model, std::uint64_t seed, std::size_t steps) {
    const Network n = to_network(parse_model_file(model));
    const Trace t = simulate(n, seed, steps);
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["initial"] = initial_to_json(n, t);
    j["trace"] = trace_to_json(n, t);
    j["deadlock"] = t.deadlock;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// "a..b" with non-negative integers; "" means the empty range.
std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text) {
    if (text.empty()) return {1, 0};
    static const std::regex re(R"(^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw DomainError("--alphas expects a..b, got '" + text + "'");
    const auto lo = std::stoll(m[1]);
    const auto hi = std::stoll(m[2]);
    if (lo < 0 || hi < 0) throw DomainError("--alphas bounds must be non-negative");
    return {lo, hi};
}

int cmd_timing(std::int64_t zeta, std::int64_t theta, const std::string& alphas) {
    if (zeta < 0 || theta < 0) throw DomainError("--zeta and --theta must be non-negative");
    const auto [lo, hi] = parse_range(alphas);
    std::cout << bufferlab::to_csv(bufferlab::timing_table(zeta, theta, lo, hi));
    return 0;
}

int cmd_models_list() {
    for (const auto& e : bufferlab::corpus()) std::cout << e.name << "\t" << e.description << "\n";
    return 0;
}

int cmd_models_emit(const std::string& name, const std::string& dir) {
    for (const auto& p : bufferlab::emit(name, dir)) std::cout << p.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tamc - zone-based model checker for networks of timed automata"};
    app.require_subcommand(1);

    CheckArgs check_args;
    auto* check = app.add_subcommand("check", "Check the queries of a query file against a model");
    check->add_option("model", check_args.model, "Model file (.tam)")->required();
    check->add_option("queries", check_args.queries, "Query file (.tq)")->required();
    check->add_option("--trace", check_args.trace, "Write verdicts and witness traces as JSON");
    check->add_option("--budget", check_args.budget, "Maximum number of explored states");
    check->add_option("--jobs", check_args.jobs, "Worker threads for successor computation");

    std::string sim_model;
    std::uint64_t seed = 0;
    std::size_t steps = 20;
    auto* sim = app.add_subcommand("simulate", "Print a random concrete run as JSON");
    sim->add_option("model", sim_model, "Model file (.tam)")->required();
    sim->add_option("--seed", seed, "Random seed");
    sim->add_option("--steps", steps, "Maximum number of transitions");

    std::int64_t zeta = 1, theta = 0;
    std::string alphas = "0..3";
    auto* timing = app.add_subcommand("timing", "Closed-form and simulated arrival times as CSV");
    timing->add_option("--zeta", zeta, "Channel transfer time");
    timing->add_option("--theta", theta, "Hold delay at M1 and Md");
    timing->add_option("--alphas", alphas, "Iteration range a..b (empty for none)");

    auto* models = app.add_subcommand("models", "List or emit the built-in model corpus");
    models->require_subcommand(1);
    models->add_subcommand("list", "List corpus models");
    std::string emit_name, emit_dir;
    auto* emit = models->add_subcommand("emit", "Write <name>.tam and <name>.tq into a directory");
    emit->add_option("name", emit_name, "Corpus model name")->required();
    emit->add_option("dir", emit_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (*check) return cmd_check(check_args);
        if (*sim) return cmd_simulate(sim_model, seed, steps);
        if (*timing) return cmd_timing(zeta, theta, alphas);
        if (*emit) return cmd_models_emit(emit_name, emit_dir);
        return cmd_models_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
