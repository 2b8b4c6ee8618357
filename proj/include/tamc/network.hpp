#ifndef TAMC_NETWORK_HPP
#define TAMC_NETWORK_HPP

// Parallel composition of templates with interleaving semantics and
// binary/broadcast channel synchronization. Delay is folded into action
// successors (zone-graph construction).

#include "tamc/dbm.hpp"
#include "tamc/ta.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tamc {

// One instantiated process; in this language an instance is named after its
// template.
struct Network {
    Declarations decls;
    std::vector<Template> instances;
    // Per clock (index 0 = reference clock) largest constant it is compared
    // against or assigned.
    std::vector<std::int32_t> max_constants;

    std::size_t clock_count() const { return decls.clock_count(); }
    std::optional<std::size_t> find_instance(std::string_view name) const;
};

// Computes max_constants from guards, invariants and clock assignments.
std::vector<std::int32_t> compute_max_constants(const Declarations& decls,
                                                const std::vector<Template>& instances);

// Assembles and validates; throws ModelError listing every problem.
Network make_network(Declarations decls, std::vector<Template> instances);

// Diagnostics across all instances plus network-level checks.
std::vector<std::string> validate_network(const Network& n);

// ── Transitions ─────────────────────────────────────────────────────────────

struct Participant {
    std::size_t instance = 0;
    std::size_t edge = 0;

    friend bool operator==(const Participant&, const Participant&) = default;
};

struct TransitionLabel {
    enum class Kind : std::uint8_t { Delay, Internal, Sync };

    Kind kind = Kind::Delay;
    std::size_t channel = 0;               // Sync only
    std::vector<Participant> participants;  // sender first for Sync

    friend bool operator==(const TransitionLabel&, const TransitionLabel&) = default;
};

std::string to_string(const TransitionLabel& t, const Network& n);

// A discretely enabled combination of edges (integer guards hold, broadcast
// receiver set fixed). Clock guards are not yet checked.
using Candidate = TransitionLabel;

// Candidates from a location vector and variable valuation, ordered by
// instance then edge, with the committed-location filter applied.
std::vector<Candidate> enumerate_candidates(const Network& n,
                                            const std::vector<LocId>& locs,
                                            const std::vector<std::int32_t>& ints);

// Applies the integer updates of all participants (sender first). Returns
// false if a result leaves its declared range.
bool apply_int_updates(const Network& n, const Candidate& c, std::vector<std::int32_t>& ints);

std::vector<LocId> target_locations(const Network& n, const Candidate& c,
                                    std::vector<LocId> locs);

std::vector<ClockConstraint> combined_clock_guard(const Network& n, const Candidate& c);
std::vector<ClockAssign> combined_clock_updates(const Network& n, const Candidate& c);

std::vector<ClockConstraint> invariant_of(const Network& n, const std::vector<LocId>& locs);

// Time may not pass when any current location is urgent or committed.
bool is_urgent(const Network& n, const std::vector<LocId>& locs);

// ── Symbolic semantics ──────────────────────────────────────────────────────

struct SymbolicState {
    std::vector<LocId> locs;
    std::vector<std::int32_t> ints;
    Dbm zone;

    friend bool operator==(const SymbolicState&, const SymbolicState&) = default;
    std::size_t discrete_hash() const;
    std::size_t hash() const;
};

// zone ∧ invariants, then up ∧ invariants unless urgent, then extrapolated.
Dbm delay_close(const Network& n, const std::vector<LocId>& locs, Dbm zone,
                const std::vector<std::int32_t>& max_constants);

SymbolicState initial_state(const Network& n);
SymbolicState initial_state(const Network& n, const std::vector<std::int32_t>& max_constants);

struct Successor {
    TransitionLabel label;
    SymbolicState state;
};

std::vector<Successor> successors(const Network& n, const SymbolicState& s);
std::vector<Successor> successors(const Network& n, const SymbolicState& s,
                                  const std::vector<std::int32_t>& max_constants);

// Weakest precondition of a sequence of clock assignments.
Dbm pre_update(Dbm z, const std::vector<ClockAssign>& assigns);

// Valuations of the delay-closed zone of s from which no action is enabled
// now or after any delay, as disjoint zones. Empty iff s has no deadlock.
std::vector<Dbm> deadlock_zones(const Network& n, const SymbolicState& s);

// Some valuation of s is deadlocked.
bool is_deadlock(const Network& n, const SymbolicState& s);

std::vector<std::string> location_names(const Network& n, const std::vector<LocId>& locs);

}  // namespace tamc

#endif  // TAMC_NETWORK_HPP
