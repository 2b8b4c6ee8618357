#include "tamc/ta.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace tamc {

std::string Bound::to_string() const {
    if (is_unbounded()) return "< inf";
    return (is_strict() ? "< " : "<= ") + std::to_string(value());
}

std::string_view to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    }
    return "?";
}

std::vector<ClockConstraint> clock_difference(ClockId x, ClockId y, CmpOp op,
                                              std::int32_t c) {
    switch (op) {
    case CmpOp::Lt: return {{x, y, Bound::strict(c)}};
    case CmpOp::Le: return {{x, y, Bound::weak(c)}};
    case CmpOp::Gt: return {{y, x, Bound::strict(-c)}};
    case CmpOp::Ge: return {{y, x, Bound::weak(-c)}};
    case CmpOp::Eq: return {{x, y, Bound::weak(c)}, {y, x, Bound::weak(-c)}};
    case CmpOp::Ne: break;
    }
    throw DomainError("'!=' on clocks does not describe a zone");
}

std::vector<ClockConstraint> clock_bound(ClockId x, CmpOp op, std::int32_t c) {
    return clock_difference(x, ClockId::zero(), op, c);
}

ClockConstraint negate_constraint(const ClockConstraint& c) {
    return {c.right, c.left, c.bound.negated()};
}

// ── Integer expressions ─────────────────────────────────────────────────────

std::int64_t evaluate(const IntExpr& e, const std::vector<std::int32_t>& vars) {
    using Op = IntExpr::Op;
    switch (e.op) {
    case Op::Const: return e.value;
    case Op::Var: return vars.at(static_cast<std::size_t>(e.value));
    case Op::Neg: return -evaluate(e.args.at(0), vars);
    default: break;
    }
    const std::int64_t a = evaluate(e.args.at(0), vars);
    const std::int64_t b = evaluate(e.args.at(1), vars);
    switch (e.op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
        if (b == 0) throw DomainError("division by zero");
        return a / b;
    case Op::Mod:
        if (b == 0) throw DomainError("modulo by zero");
        return a % b;
    default: break;
    }
    return 0;
}

namespace {

bool compare(std::int64_t a, CmpOp op, std::int64_t b) {
    switch (op) {
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Ge: return a >= b;
    case CmpOp::Gt: return a > b;
    }
    return false;
}

void collect_vars(const IntExpr& e, std::vector<std::size_t>& out) {
    if (e.op == IntExpr::Op::Var) out.push_back(static_cast<std::size_t>(e.value));
    for (const auto& a : e.args) collect_vars(a, out);
}

}  // namespace

bool holds(const IntPredicate& p, const std::vector<std::int32_t>& vars) {
    return compare(evaluate(p.lhs, vars), p.op, evaluate(p.rhs, vars));
}

bool holds(const std::vector<IntPredicate>& ps, const std::vector<std::int32_t>& vars) {
    return std::all_of(ps.begin(), ps.end(),
                       [&](const IntPredicate& p) { return holds(p, vars); });
}

// ── Declarations ────────────────────────────────────────────────────────────

std::optional<ClockId> Declarations::find_clock(std::string_view name) const {
    auto it = std::find(clocks.begin(), clocks.end(), name);
    if (it == clocks.end()) return std::nullopt;
    return ClockId{static_cast<std::size_t>(it - clocks.begin()) + 1};
}

std::optional<VarId> Declarations::find_int(std::string_view name) const {
    for (std::size_t i = 0; i < ints.size(); ++i)
        if (ints[i].name == name) return i;
    return std::nullopt;
}

std::optional<std::size_t> Declarations::find_channel(std::string_view name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name == name) return i;
    return std::nullopt;
}

std::string Declarations::clock_name(ClockId c) const {
    if (c.is_zero()) return "0";
    if (c.index - 1 < clocks.size()) return clocks[c.index - 1];
    return "#" + std::to_string(c.index);
}

std::optional<LocId> Template::find_location(std::string_view n) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (locations[i].name == n) return i;
    return std::nullopt;
}

std::string to_string(const ClockConstraint& c, const Declarations& decls) {
    std::ostringstream os;
    const auto b = c.bound;
    if (b.is_unbounded()) return "true";
    if (c.right.is_zero()) {
        os << decls.clock_name(c.left) << (b.is_strict() ? " < " : " <= ") << b.value();
    } else if (c.left.is_zero()) {
        os << decls.clock_name(c.right) << (b.is_strict() ? " > " : " >= ") << -b.value();
    } else {
        os << decls.clock_name(c.left) << " - " << decls.clock_name(c.right)
           << (b.is_strict() ? " < " : " <= ") << b.value();
    }
    return os.str();
}

// ── Validation ──────────────────────────────────────────────────────────────

std::vector<TemplateDiagnostic> validate_template(const Template& t,
                                                  const Declarations& decls) {
    std::vector<TemplateDiagnostic> out;
    const std::size_t nclocks = decls.clock_count();
    auto clock_ok = [&](ClockId c) { return c.index <= nclocks; };
    auto check_constraint = [&](const ClockConstraint& c, std::optional<std::size_t> loc,
                                std::optional<std::size_t> edge) {
        if (c.left == c.right)
            out.push_back({loc, edge, "constraint compares a clock with itself"});
        if (!clock_ok(c.left) || !clock_ok(c.right))
            out.push_back({loc, edge, "undeclared clock"});
    };
    auto check_expr = [&](const IntExpr& e, std::optional<std::size_t> edge) {
        std::vector<std::size_t> vs;
        collect_vars(e, vs);
        for (auto v : vs)
            if (v >= decls.ints.size()) out.push_back({std::nullopt, edge, "undeclared variable"});
    };

    if (t.locations.empty()) out.push_back({std::nullopt, std::nullopt, "no locations"});
    if (t.initial >= t.locations.size())
        out.push_back({std::nullopt, std::nullopt, "initial location does not exist"});

    std::set<std::string> names;
    for (std::size_t i = 0; i < t.locations.size(); ++i) {
        const auto& l = t.locations[i];
        if (!names.insert(l.name).second) out.push_back({i, std::nullopt, "duplicate location name"});
        for (const auto& c : l.invariant) {
            check_constraint(c, i, std::nullopt);
            if (c.left.is_zero())
                out.push_back({i, std::nullopt, "invariant must be an upper bound"});
        }
    }

    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        const auto& edge = t.edges[e];
        if (edge.source >= t.locations.size()) out.push_back({std::nullopt, e, "dangling source"});
        if (edge.target >= t.locations.size()) out.push_back({std::nullopt, e, "dangling target"});
        for (const auto& c : edge.guard.clocks) check_constraint(c, std::nullopt, e);
        for (const auto& p : edge.guard.ints) {
            check_expr(p.lhs, e);
            check_expr(p.rhs, e);
        }
        if (edge.sync.kind != SyncLabel::Kind::Internal) {
            if (edge.sync.channel >= decls.channels.size()) {
                out.push_back({std::nullopt, e, "unknown channel"});
            } else if (edge.sync.kind == SyncLabel::Kind::Receive &&
                       decls.channels[edge.sync.channel].kind == ChannelKind::Broadcast &&
                       !edge.guard.clocks.empty()) {
                out.push_back({std::nullopt, e, "clock guard on broadcast receiver"});
            }
        }
        for (const auto& u : edge.updates) {
            if (const auto* ca = std::get_if<ClockAssign>(&u)) {
                if (ca->clock.is_zero() || !clock_ok(ca->clock))
                    out.push_back({std::nullopt, e, "assignment to undeclared clock"});
                if (ca->value < 0) out.push_back({std::nullopt, e, "negative clock assignment"});
            } else {
                const auto& ia = std::get<IntAssign>(u);
                if (ia.var >= decls.ints.size())
                    out.push_back({std::nullopt, e, "assignment to undeclared variable"});
                check_expr(ia.expr, e);
            }
        }
    }
    return out;
}

}  // namespace tamc
