// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all
// criteria pass.

#include "cli_runner.hpp"
#include "dbm_properties.hpp"
#include "model_fuzz.hpp"
#include "region.hpp"
#include "replay.hpp"

#include "tamc/bufferlab.hpp"
#include "tamc/modelspec.hpp"
#include "tamc/verifier.hpp"

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace tamc;

namespace {

// Thrown by require() with the reason a criterion failed.
struct Unmet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& why) {
    if (!ok) throw Unmet(why);
}

Network corpus_network(const std::string& name) { return load_network(bufferlab::corpus_entry(name).model); }

Query query(const std::string& text) {
    auto r = parse_queries(text);
    require(r.ok() && r.value->size() == 1, "query does not parse: " + text);
    return r.value->front();
}

std::string location_of(const Network& n, const std::vector<LocId>& locs, const std::string& instance) {
    auto i = *n.find_instance(instance);
    return n.instances[i].locations[locs[i]].name;
}

void require_replays(const Network& n, const Trace& t) {
    auto r = testkit::replay(n, t);
    require(r.ok, "witness does not replay: " + r.error);
}

// ── Criteria ────────────────────────────────────────────────────────────────

std::string existing_unshifted() {
    Network n = corpus_network("existing");
    Verdict v = check(n, query("A[] not deadlock"));
    require(!v.satisfied, "A[] not deadlock is satisfied");
    require(v.witness && v.witness->deadlock, "no deadlock witness");
    require_replays(n, *v.witness);
    const auto& last = v.witness->steps.back().locs;
    std::string m1 = location_of(n, last, "M1"), m2 = location_of(n, last, "M2");
    require(m1.rfind("hold", 0) == 0 && m2.rfind("hold", 0) == 0,
            "final state does not have both buffers holding a packet (M1." + m1 + ", M2." + m2 + ")");
    return "NOT SATISFIED, trace ends with M1." + m1 + " and M2." + m2 + " at t=" +
           to_string(v.witness->total_time());
}

std::string existing_shifted() {
    Network n = corpus_network("existing_shifted");
    Verdict v = check(n, query("A[] not deadlock"));
    require(v.satisfied, "A[] not deadlock is not satisfied");
    return "SATISFIED (" + std::to_string(v.stats.stored) + " symbolic states)";
}

std::string proposed_notime() {
    Network n = corpus_network("proposed_notime");
    Verdict v = check(n, query("A[] not deadlock"));
    require(!v.satisfied, "A[] not deadlock is satisfied");
    require(v.witness.has_value(), "no witness");
    require_replays(n, *v.witness);
    return "NOT SATISFIED after " + std::to_string(v.witness->steps.size()) + " transitions";
}

std::string proposed_det() {
    Network n = corpus_network("proposed_det");
    Verdict v = check(n, query("A[] not deadlock"));
    require(!v.satisfied, "A[] not deadlock is satisfied");
    require_replays(n, *v.witness);

    // Minimal deadlock time via an observer clock that is never reset.
    Network observed = load_network("clock now;\n" + bufferlab::corpus_entry("proposed_det").model);
    Verdict before = check(observed, query("E<> deadlock and now < 10"));
    require(!before.satisfied, "a deadlock is reachable before time 10");
    Verdict at = check(observed, query("E<> deadlock and now <= 10"));
    require(at.satisfied && at.witness, "no deadlock by time 10");
    require_replays(observed, *at.witness);
    require(at.witness->total_time() == Rational(10),
            "witness reaches the deadlock at t=" + to_string(at.witness->total_time()));
    return "NOT SATISFIED, earliest deadlock at t=10 (none before 10)";
}

std::string proposed_nondet() {
    Network n = corpus_network("proposed_nondet");
    for (const char* q : {"E<> M1.G2_receive", "A[] not deadlock", "G1.send --> E1.receive"})
        require(check(n, query(q)).satisfied, std::string(q) + " is not satisfied");
    return "E<> M1.G2_receive, A[] not deadlock, G1.send --> E1.receive all SATISFIED";
}

std::string timing_grid() {
    std::size_t compared = 0;
    for (std::int64_t zeta : {1, 2, 3})
        for (std::int64_t theta : {0, 1, 2, 5}) {
            auto sim = bufferlab::simulate_arrivals(zeta, theta, 10);
            for (std::int64_t alpha = 0; alpha <= 10; ++alpha)
                for (std::size_t k = 0; k < 8; ++k) {
                    auto expected = bufferlab::arrival_time(bufferlab::kArrivalPoints[k], {zeta, theta, alpha});
                    auto measured = sim.points[static_cast<std::size_t>(alpha)][k];
                    std::ostringstream why;
                    why << to_string(bufferlab::kArrivalPoints[k]) << " zeta=" << zeta << " theta=" << theta
                        << " alpha=" << alpha << ": measured " << measured << ", closed form " << expected;
                    require(measured == expected, why.str());
                    ++compared;
                }
        }
    return std::to_string(compared) + " arrival times equal";
}

std::string oracle_equivalence() {
    std::size_t verdicts = 0;
    for (const auto& entry : bufferlab::corpus()) {
        Network n = load_network(entry.model);
        auto r = explore(n, [](const SymbolicState&) { return false; });
        std::set<std::vector<LocId>> zone;
        for (const auto& s : r.states) zone.insert(s.locs);
        require(zone == oracle::region_reachable_locations(n), entry.name + ": location-vector sets differ");

        std::vector<Query> qs;
        for (const auto& q : *parse_queries(entry.queries).value)
            if (q.kind == Query::Kind::ExistsEventually || q.kind == Query::Kind::AlwaysGlobally) qs.push_back(q);
        std::vector<StateFormula> atoms{StateFormula::deadlock()};
        for (const auto& t : n.instances)
            for (const auto& l : t.locations) atoms.push_back(StateFormula::location(t.name, l.name));
        for (const auto& a : atoms) {
            qs.push_back(Query{Query::Kind::ExistsEventually, a, {}});
            qs.push_back(Query{Query::Kind::AlwaysGlobally, StateFormula::negation(a), {}});
        }
        for (const auto& q : qs) {
            require(check(n, q).satisfied == oracle::region_check(n, q), entry.name + ": verdicts differ on " + to_string(q));
            ++verdicts;
        }
    }
    return "5 models, location sets equal, " + std::to_string(verdicts) + " verdicts agree";
}

std::string dbm_suite() {
    std::size_t samples = 0;
    for (const auto& r : testkit::run_dbm_properties(20240601, 10'000)) {
        require(r.ok(), r.name + ": " + std::to_string(r.failures) + " disagreements, first: " + r.first_failure);
        samples += r.samples;
    }
    return std::to_string(samples) + " samples, 0 disagreements";
}

std::string cli_determinism(const std::filesystem::path& tool) {
    auto bad = testkit::nondeterministic_commands(tool);
    require(bad.empty(), bad.empty() ? "" : "output differs for: " + bad.front());
    return "every command byte-identical across two runs";
}

std::string round_trip() {
    for (const auto& entry : bufferlab::corpus()) {
        auto f = testkit::round_trip_failure(entry.model);
        require(!f, entry.name + ": " + f.value_or(""));
    }
    std::mt19937_64 rng(20240601);
    for (int i = 0; i < 500; ++i) {
        std::string text = testkit::random_model_text(rng);
        auto f = testkit::round_trip_failure(text);
        require(!f, "generated model " + std::to_string(i) + ": " + f.value_or(""));
    }
    return "5 corpus files and 500 generated models";
}

}  // namespace

int main(int argc, char** argv) {
    std::filesystem::path tool = argc > 1 ? argv[1] : TAMC_TOOL;
    struct Criterion {
        int id;
        std::string title;
        std::function<std::string()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "existing system deadlocks", existing_unshifted},
        {2, "shifted existing system is deadlock free", existing_shifted},
        {3, "proposed no-time system deadlocks", proposed_notime},
        {4, "proposed deterministic system deadlocks at t=10", proposed_det},
        {5, "proposed non-deterministic system meets all properties", proposed_nondet},
        {6, "timing closed forms match simulation", timing_grid},
        {7, "zone engine matches region oracle", oracle_equivalence},
        {8, "zone algebra property suite", dbm_suite},
        {9, "CLI determinism", [&] { return cli_determinism(tool); }},
        {10, "parse/print round trip", round_trip},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        failed += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << c.id << ". " << c.title << " — " << detail << " (" << ms
                  << " ms)\n";
    }
    std::cout << (failed == 0 ? "all 10 criteria passed" : std::to_string(failed) + " criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
