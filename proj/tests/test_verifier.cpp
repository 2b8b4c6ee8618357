#include "replay.hpp"

#include "tamc/bufferlab.hpp"
#include "tamc/errors.hpp"
#include "tamc/modelspec.hpp"
#include "tamc/verifier.hpp"

#include <doctest.h>

#include <functional>

using namespace tamc;
using tamc::testkit::concrete_satisfies;
using tamc::testkit::replay;

namespace {

Network corpus_network(const std::string& name) { return load_network(bufferlab::corpus_entry(name).model); }

Query query(const std::string& text) {
    auto r = parse_queries(text);
    REQUIRE(r.ok());
    REQUIRE(r.value->size() == 1);
    return r.value->front();
}

bool mentions_deadlock(const StateFormula& f) {
    if (f.kind == StateFormula::Kind::Deadlock) return true;
    for (const auto& a : f.args)
        if (mentions_deadlock(a)) return true;
    return false;
}

// Location atoms of every instance plus a few fixed formulas.
std::vector<StateFormula> formula_set(const Network& n) {
    std::vector<StateFormula> fs{StateFormula::truth(true), StateFormula::truth(false), StateFormula::deadlock()};
    for (const auto& t : n.instances)
        for (const auto& l : t.locations) fs.push_back(StateFormula::location(t.name, l.name));
    return fs;
}

}  // namespace

// ── Exploration ─────────────────────────────────────────────────────────────

TEST_CASE("stopping on the initial state explores one state") {
    Network n = corpus_network("proposed_nondet");
    auto r = explore(n, [](const SymbolicState&) { return true; });
    REQUIRE(r.found);
    CHECK(*r.found == 0);
    CHECK(r.stats.explored == 1);
    Trace t = reconstruct_trace(n, r, *r.found);
    CHECK(t.steps.empty());
}

TEST_CASE("full exploration of the non-deterministic model is finite and reproducible") {
    Network n = corpus_network("proposed_nondet");
    auto a = explore(n, [](const SymbolicState&) { return false; });
    auto b = explore(n, [](const SymbolicState&) { return false; });
    CHECK_FALSE(a.found);
    CHECK(a.stats == b.stats);
    CHECK(a.stats.stored == a.states.size());
    // Regression baseline recorded when the corpus was authored.
    CHECK(a.stats.stored == 48);
}

TEST_CASE("exploration finds the no-time deadlock") {
    Network n = corpus_network("proposed_notime");
    auto r = explore(n, [&](const SymbolicState& s) { return is_deadlock(n, s); });
    CHECK(r.found);
}

TEST_CASE("budget is enforced") {
    Network n = corpus_network("proposed_nondet");
    CHECK_THROWS_AS(explore(n, [](const SymbolicState&) { return false; }, ExploreOptions{5, 1}), BudgetError);
}

TEST_CASE("parallel successor computation does not change results") {
    for (const auto& entry : bufferlab::corpus()) {
        CAPTURE(entry.name);
        Network n = load_network(entry.model);
        auto one = explore(n, [](const SymbolicState&) { return false; }, ExploreOptions{1'000'000, 1});
        auto four = explore(n, [](const SymbolicState&) { return false; }, ExploreOptions{1'000'000, 4});
        CHECK(one.stats == four.stats);
        CHECK(one.states == four.states);
    }
}

// ── Verdicts ────────────────────────────────────────────────────────────────

TEST_CASE("non-deterministic model satisfies all three properties") {
    Network n = corpus_network("proposed_nondet");
    CHECK(check(n, query("E<> M1.G2_receive")).satisfied);
    CHECK(check(n, query("A[] not deadlock")).satisfied);
    Verdict live = check(n, query("G1.send --> E1.receive"));
    CHECK(live.satisfied);
    CHECK(live.zeno_caveat);
}

TEST_CASE("deterministic model deadlocks") {
    Network n = corpus_network("proposed_det");
    Verdict v = check(n, query("A[] not deadlock"));
    CHECK_FALSE(v.satisfied);
    REQUIRE(v.witness);
    CHECK(v.witness->deadlock);
}

TEST_CASE("leads-to fails when the forward exit is cut off") {
    std::string text = bufferlab::corpus_entry("proposed_nondet").model;
    // E1 can never accept a packet.
    for (std::size_t at = 0; (at = text.find("{ sync c?; }", at)) != std::string::npos; ++at)
        text.replace(at, 12, "{ guard x < 0; sync c?; }");
    Network broken = load_network(text);
    Verdict v = check(broken, query("G1.send --> E1.receive"));
    CHECK_FALSE(v.satisfied);
    REQUIRE(v.witness);
    CHECK(replay(broken, *v.witness).ok);
}

TEST_CASE("other liveness forms") {
    Network n = load_network(
        "clock x;\nprocess P { loc a inv x <= 2; loc b; init a; a -> b { guard x >= 1; } b -> a { assign x := 0; } }\n"
        "system P;\n");
    CHECK(check(n, query("A<> P.b")).satisfied);
    CHECK(check(n, query("E[] (P.a or P.b)")).satisfied);
    // The invariant forces P out of a.
    CHECK_FALSE(check(n, query("E[] P.a")).satisfied);
    CHECK_FALSE(check(n, query("A<> false")).satisfied);
}

TEST_CASE("unknown names are rejected") {
    Network n = corpus_network("proposed_nondet");
    CHECK_THROWS_AS(check(n, query("E<> M9.idle")), NameError);
    CHECK_THROWS_AS(check(n, query("E<> M1.nowhere")), NameError);
    CHECK_THROWS_AS(check(n, query("E<> zz > 1")), NameError);
}

TEST_CASE("A[] phi and E<> not phi are exact complements") {
    for (const auto& entry : bufferlab::corpus()) {
        CAPTURE(entry.name);
        Network n = load_network(entry.model);
        for (const auto& phi : formula_set(n)) {
            CAPTURE(to_string(phi));
            bool always = check(n, Query{Query::Kind::AlwaysGlobally, phi, {}}).satisfied;
            bool eventually_not =
                check(n, Query{Query::Kind::ExistsEventually, StateFormula::negation(phi), {}}).satisfied;
            CHECK(always != eventually_not);
        }
    }
}

// ── Witnesses ───────────────────────────────────────────────────────────────

TEST_CASE("every witness replays through the concrete semantics") {
    for (const auto& entry : bufferlab::corpus()) {
        CAPTURE(entry.name);
        Network n = load_network(entry.model);
        std::vector<Query> qs = *parse_queries(entry.queries).value;
        for (const auto& phi : formula_set(n)) {
            qs.push_back(Query{Query::Kind::ExistsEventually, phi, {}});
            qs.push_back(Query{Query::Kind::AlwaysGlobally, phi, {}});
        }
        for (const auto& q : qs) {
            CAPTURE(to_string(q));
            Verdict v = check(n, q);
            if (!v.witness) continue;
            auto r = replay(n, *v.witness);
            CAPTURE(r.error);
            REQUIRE(r.ok);
            if (mentions_deadlock(q.phi)) continue;
            if (q.kind == Query::Kind::ExistsEventually) CHECK(concrete_satisfies(n, r.locs, r.ints, r.valuation, q.phi));
            if (q.kind == Query::Kind::AlwaysGlobally) CHECK_FALSE(concrete_satisfies(n, r.locs, r.ints, r.valuation, q.phi));
        }
    }
}

TEST_CASE("witnesses reach clock constraints of the goal") {
    Network n = corpus_network("proposed_nondet");
    Verdict v = check(n, query("E<> M1.G1_receive and x > 2"));
    REQUIRE(v.satisfied);
    auto r = replay(n, *v.witness);
    REQUIRE(r.ok);
    CHECK(r.valuation[1] > Rational(2));
}

TEST_CASE("shifted existing system emits G1's first packet at 15") {
    Network n = corpus_network("existing_shifted");
    Verdict v = check(n, query("E<> E2.got"));
    REQUIRE(v.satisfied);
    REQUIRE(v.witness);
    Rational now{0};
    std::optional<Rational> first_g1;
    for (const auto& s : v.witness->steps) {
        now += s.delay;
        if (s.label.kind == TransitionLabel::Kind::Sync && n.instances[s.label.participants[0].instance].name == "G1") {
            first_g1 = now;
            break;
        }
    }
    REQUIRE(first_g1);
    CHECK(*first_g1 == Rational(15));
}

// ── JSON ────────────────────────────────────────────────────────────────────

TEST_CASE("verdict JSON has the fixed shape") {
    Network n = corpus_network("proposed_notime");
    Query q = query("A[] not deadlock");
    auto j = verdict_to_json(n, q, check(n, q));
    CHECK(j["query"] == "A[] not deadlock");
    CHECK(j["satisfied"] == false);
    CHECK(j["stats"].contains("explored"));
    REQUIRE(j["trace"].is_array());
    for (const auto& step : j["trace"]) {
        CHECK(step.contains("label"));
        CHECK(step.contains("delay"));
        CHECK(step.contains("locations"));
        CHECK(step.contains("zone"));
    }
}

// ── Simulation ──────────────────────────────────────────────────────────────

TEST_CASE("simulation is deterministic per seed and replays") {
    for (const auto& entry : bufferlab::corpus()) {
        CAPTURE(entry.name);
        Network n = load_network(entry.model);
        for (std::uint64_t seed : {1u, 2u, 99u}) {
            Trace a = simulate(n, seed, 30);
            Trace b = simulate(n, seed, 30);
            CHECK(trace_to_json(n, a).dump() == trace_to_json(n, b).dump());
            auto r = replay(n, a);
            CAPTURE(r.error);
            CHECK(r.ok);
        }
    }
}

TEST_CASE("zero simulation steps give an empty trace") {
    Network n = corpus_network("proposed_nondet");
    CHECK(simulate(n, 1, 0).steps.empty());
}

TEST_CASE("either generator may act first in the non-deterministic model") {
    Network n = corpus_network("proposed_nondet");
    bool g1_first = false, g2_first = false;
    for (std::uint64_t seed = 0; seed < 64 && !(g1_first && g2_first); ++seed) {
        Trace t = simulate(n, seed, 1);
        REQUIRE(t.steps.size() == 1);
        const auto& name = n.instances[t.steps[0].label.participants[0].instance].name;
        g1_first |= name == "G1";
        g2_first |= name == "G2";
    }
    CHECK(g1_first);
    CHECK(g2_first);
}

TEST_CASE("documented seed drives the no-time model into deadlock") {
    Network n = corpus_network("proposed_notime");
    Trace t = simulate(n, bufferlab::kNoTimeDeadlockSeed, 20);
    CHECK(t.deadlock);
    CHECK(t.steps.size() <= 20);
}
