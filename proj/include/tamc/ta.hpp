#ifndef TAMC_TA_HPP
#define TAMC_TA_HPP

// Timed automaton building blocks: clocks, constraints, bounded integer
// expressions, locations, edges and templates. All types are plain values.

#include "tamc/bound.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tamc {

// ── ClockId ─────────────────────────────────────────────────────────────────
// Index into the network clock table. 0 is the reference clock that is always
// zero; declared clocks are 1..N.

struct ClockId {
    std::size_t index = 0;

    static constexpr ClockId zero() { return ClockId{0}; }
    constexpr bool is_zero() const { return index == 0; }
    friend constexpr auto operator<=>(ClockId, ClockId) = default;
};

// left - right < bound  /  left - right <= bound
struct ClockConstraint {
    ClockId left;
    ClockId right;
    Bound bound;

    friend bool operator==(const ClockConstraint&, const ClockConstraint&) = default;
};

enum class CmpOp : std::uint8_t { Lt, Le, Eq, Ne, Ge, Gt };

std::string_view to_string(CmpOp op);

// x op c for a single clock; "==" expands to two constraints, "!=" is not a
// zone and is rejected with DomainError.
std::vector<ClockConstraint> clock_bound(ClockId x, CmpOp op, std::int32_t c);

// x - y op c
std::vector<ClockConstraint> clock_difference(ClockId x, ClockId y, CmpOp op,
                                              std::int32_t c);

// Complement of the constraint's satisfying set, as a single constraint.
ClockConstraint negate_constraint(const ClockConstraint& c);

// ── Integer expressions ─────────────────────────────────────────────────────

using VarId = std::size_t;

struct IntExpr {
    enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Mod };

    Op op = Op::Const;
    std::int32_t value = 0;  // constant, or variable index for Op::Var
    std::vector<IntExpr> args;

    static IntExpr constant(std::int32_t v) { return IntExpr{Op::Const, v, {}}; }
    static IntExpr variable(VarId v) {
        return IntExpr{Op::Var, static_cast<std::int32_t>(v), {}};
    }
    static IntExpr unary(Op op, IntExpr a) { return IntExpr{op, 0, {std::move(a)}}; }
    static IntExpr binary(Op op, IntExpr a, IntExpr b) {
        return IntExpr{op, 0, {std::move(a), std::move(b)}};
    }

    friend bool operator==(const IntExpr&, const IntExpr&) = default;
};

// Evaluates over a variable valuation; division by zero raises DomainError.
std::int64_t evaluate(const IntExpr& e, const std::vector<std::int32_t>& vars);

struct IntPredicate {
    IntExpr lhs;
    CmpOp op = CmpOp::Eq;
    IntExpr rhs;

    friend bool operator==(const IntPredicate&, const IntPredicate&) = default;
};

bool holds(const IntPredicate& p, const std::vector<std::int32_t>& vars);
bool holds(const std::vector<IntPredicate>& ps, const std::vector<std::int32_t>& vars);

// ── Declarations ────────────────────────────────────────────────────────────

struct IntVarDecl {
    std::string name;
    std::int32_t lo = -32768;
    std::int32_t hi = 32767;

    friend bool operator==(const IntVarDecl&, const IntVarDecl&) = default;
};

enum class ChannelKind : std::uint8_t { Binary, Broadcast };

struct ChannelDecl {
    std::string name;
    ChannelKind kind = ChannelKind::Binary;

    friend bool operator==(const ChannelDecl&, const ChannelDecl&) = default;
};

// Network-wide names. clocks[i] names ClockId{i + 1}.
struct Declarations {
    std::vector<std::string> clocks;
    std::vector<IntVarDecl> ints;
    std::vector<ChannelDecl> channels;

    std::size_t clock_count() const { return clocks.size(); }
    std::optional<ClockId> find_clock(std::string_view name) const;
    std::optional<VarId> find_int(std::string_view name) const;
    std::optional<std::size_t> find_channel(std::string_view name) const;
    std::string clock_name(ClockId c) const;

    friend bool operator==(const Declarations&, const Declarations&) = default;
};

// ── Locations and edges ─────────────────────────────────────────────────────

enum class LocationKind : std::uint8_t { Normal, Urgent, Committed };

using LocId = std::size_t;

struct Location {
    std::string name;
    LocationKind kind = LocationKind::Normal;
    std::vector<ClockConstraint> invariant;

    friend bool operator==(const Location&, const Location&) = default;
};

struct SyncLabel {
    enum class Kind : std::uint8_t { Internal, Send, Receive };

    Kind kind = Kind::Internal;
    std::size_t channel = 0;

    static SyncLabel internal() { return {}; }
    static SyncLabel send(std::size_t ch) { return {Kind::Send, ch}; }
    static SyncLabel receive(std::size_t ch) { return {Kind::Receive, ch}; }

    friend bool operator==(const SyncLabel&, const SyncLabel&) = default;
};

struct Guard {
    std::vector<ClockConstraint> clocks;
    std::vector<IntPredicate> ints;

    bool empty() const { return clocks.empty() && ints.empty(); }
    friend bool operator==(const Guard&, const Guard&) = default;
};

struct ClockAssign {
    ClockId clock;
    std::int32_t value = 0;

    friend bool operator==(const ClockAssign&, const ClockAssign&) = default;
};

struct IntAssign {
    VarId var = 0;
    IntExpr expr;

    friend bool operator==(const IntAssign&, const IntAssign&) = default;
};

using Update = std::variant<ClockAssign, IntAssign>;

struct Edge {
    LocId source = 0;
    LocId target = 0;
    Guard guard;
    SyncLabel sync;
    std::vector<Update> updates;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// ── Template ────────────────────────────────────────────────────────────────
// One process: (locations, initial location, edges, invariants). Clocks,
// variables and channels live in the enclosing Declarations.

struct Template {
    std::string name;
    std::vector<Location> locations;
    LocId initial = 0;
    std::vector<Edge> edges;

    std::optional<LocId> find_location(std::string_view name) const;

    friend bool operator==(const Template&, const Template&) = default;
};

struct TemplateDiagnostic {
    std::optional<std::size_t> location;
    std::optional<std::size_t> edge;
    std::string message;
};

// Empty iff the template is well formed against the declarations.
std::vector<TemplateDiagnostic> validate_template(const Template& t,
                                                  const Declarations& decls);

// "x <= 5", "x > 2", "x - y < 3"
std::string to_string(const ClockConstraint& c, const Declarations& decls);

}  // namespace tamc

#endif  // TAMC_TA_HPP
