#ifndef TAMC_VERIFIER_HPP
#define TAMC_VERIFIER_HPP

// Zone-graph exploration and query checking.

#include "tamc/network.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace tamc {

// ── Formulas ────────────────────────────────────────────────────────────────

// Names are resolved against a network when a query is checked. A Compare
// atom refers to either a clock or an integer variable.
struct StateFormula {
    enum class Kind : std::uint8_t { True, False, Location, Compare, Deadlock, Not, And, Or };

    Kind kind = Kind::True;
    std::string instance;  // Location
    std::string name;      // Location: location name; Compare: clock or variable
    CmpOp op = CmpOp::Eq;
    std::int32_t constant = 0;
    std::vector<StateFormula> args;

    static StateFormula truth(bool v) { return {v ? Kind::True : Kind::False, {}, {}, CmpOp::Eq, 0, {}}; }
    static StateFormula location(std::string inst, std::string loc) {
        return {Kind::Location, std::move(inst), std::move(loc), CmpOp::Eq, 0, {}};
    }
    static StateFormula compare(std::string name, CmpOp op, std::int32_t c) {
        return {Kind::Compare, {}, std::move(name), op, c, {}};
    }
    static StateFormula deadlock() { return {Kind::Deadlock, {}, {}, CmpOp::Eq, 0, {}}; }
    static StateFormula negation(StateFormula f) { return {Kind::Not, {}, {}, CmpOp::Eq, 0, {std::move(f)}}; }
    static StateFormula conjunction(StateFormula a, StateFormula b) {
        return {Kind::And, {}, {}, CmpOp::Eq, 0, {std::move(a), std::move(b)}};
    }
    static StateFormula disjunction(StateFormula a, StateFormula b) {
        return {Kind::Or, {}, {}, CmpOp::Eq, 0, {std::move(a), std::move(b)}};
    }

    friend bool operator==(const StateFormula&, const StateFormula&) = default;
};

std::string to_string(const StateFormula& f);

struct Query {
    enum class Kind : std::uint8_t { ExistsEventually, AlwaysGlobally, ExistsGlobally, AlwaysEventually, LeadsTo };

    Kind kind = Kind::ExistsEventually;
    StateFormula phi;
    StateFormula psi;  // LeadsTo only

    friend bool operator==(const Query&, const Query&) = default;
};

// "E<> M1.G2_receive", "A[] not deadlock", "G1.send --> E1.receive"
std::string to_string(const Query& q);

// ── Traces and verdicts ─────────────────────────────────────────────────────

struct TraceStep {
    TransitionLabel label;
    std::vector<LocId> locs;
    std::vector<std::int32_t> ints;
    std::optional<Dbm> zone;  // symbolic state reached; absent for simulations
    Rational delay{0};        // time spent before taking the transition
    Valuation valuation;      // clocks right after the transition
};

struct Trace {
    std::vector<LocId> initial_locs;
    std::vector<std::int32_t> initial_ints;
    std::optional<Dbm> initial_zone;
    std::vector<TraceStep> steps;
    std::optional<std::size_t> loop_start;  // lasso: steps[loop_start..] repeat
    bool deadlock = false;                  // ends in a state without successors

    Rational total_time() const;
};

struct Stats {
    std::size_t explored = 0;
    std::size_t stored = 0;
    std::size_t max_waiting = 0;

    friend bool operator==(const Stats&, const Stats&) = default;
};

struct Verdict {
    bool satisfied = false;
    std::optional<Trace> witness;
    Stats stats;
    // Liveness results are computed without excluding zeno runs.
    bool zeno_caveat = false;
};

struct ExploreOptions {
    std::size_t budget = 1'000'000;
    std::size_t jobs = 1;
};

// ── Exploration ─────────────────────────────────────────────────────────────

struct ParentLink {
    std::optional<std::size_t> parent;  // index into ExploreResult::states
    TransitionLabel label;
};

struct ExploreResult {
    std::optional<std::size_t> found;
    std::vector<SymbolicState> states;  // passed list, in discovery order
    std::vector<ParentLink> parents;
    Stats stats;
};

using StatePredicate = std::function<bool(const SymbolicState&)>;

// Breadth-first exploration with inclusion subsumption; stops at the first
// state satisfying `stop`. Throws BudgetError past options.budget states.
ExploreResult explore(const Network& n, const StatePredicate& stop, const ExploreOptions& options = {});
ExploreResult explore(const Network& n, const std::vector<std::int32_t>& max_constants,
                      const StatePredicate& stop, const ExploreOptions& options = {});

// Path from the initial state to `goal` with minimal concrete delays. The
// final state is additionally driven into `goal_constraints` by a trailing
// delay step if needed.
Trace reconstruct_trace(const Network& n, const ExploreResult& r, std::size_t goal,
                        const std::vector<ClockConstraint>& goal_constraints = {});

// Concretizes an explicit path of transitions from the initial state.
Trace concretize_path(const Network& n, const std::vector<TransitionLabel>& labels,
                      const std::vector<SymbolicState>& states,
                      const std::vector<ClockConstraint>& goal_constraints = {});

Verdict check(const Network& n, const Query& q, const ExploreOptions& options = {});

// Random concrete run: uniform choice among enabled transitions, delays
// drawn from each transition's feasible interval.
Trace simulate(const Network& n, std::uint64_t seed, std::size_t steps);

// ── Serialization ───────────────────────────────────────────────────────────

// Start state of a trace: time, locations, variables, zone, valuation.
nlohmann::ordered_json initial_to_json(const Network& n, const Trace& t);
// One entry per step: label, delay, time, locations, variables, zone,
// valuation. loop_start indexes this array.
nlohmann::ordered_json trace_to_json(const Network& n, const Trace& t);
nlohmann::ordered_json verdict_to_json(const Network& n, const Query& q, const Verdict& v);

}  // namespace tamc

#endif  // TAMC_VERIFIER_HPP
