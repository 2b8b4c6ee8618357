#include "tamc/network.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

namespace tamc {

std::optional<std::size_t> Network::find_instance(std::string_view name) const {
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (instances[i].name == name) return i;
    return std::nullopt;
}

std::vector<std::int32_t> compute_max_constants(const Declarations& decls,
                                                const std::vector<Template>& instances) {
    std::vector<std::int32_t> m(decls.clock_count() + 1, 0);
    auto note = [&](const ClockConstraint& c) {
        if (c.bound.is_unbounded()) return;
        const std::int32_t v = std::abs(c.bound.value());
        if (c.left.index < m.size()) m[c.left.index] = std::max(m[c.left.index], v);
        if (c.right.index < m.size()) m[c.right.index] = std::max(m[c.right.index], v);
    };
    for (const auto& t : instances) {
        for (const auto& l : t.locations)
            for (const auto& c : l.invariant) note(c);
        for (const auto& e : t.edges) {
            for (const auto& c : e.guard.clocks) note(c);
            for (const auto& u : e.updates)
                if (const auto* a = std::get_if<ClockAssign>(&u); a && a->clock.index < m.size())
                    m[a->clock.index] = std::max(m[a->clock.index], a->value);
        }
    }
    m[0] = 0;
    return m;
}

std::vector<std::string> validate_network(const Network& n) {
    std::vector<std::string> out;
    std::set<std::string> names;
    for (const auto& t : n.instances) {
        if (!names.insert(t.name).second) out.push_back("duplicate instance " + t.name);
        for (const auto& d : validate_template(t, n.decls)) {
            std::string where = t.name;
            if (d.location) where += " location " + std::to_string(*d.location);
            if (d.edge) where += " edge " + std::to_string(*d.edge);
            out.push_back(where + ": " + d.message);
        }
    }
    std::set<std::string> chans;
    for (const auto& c : n.decls.channels)
        if (!chans.insert(c.name).second) out.push_back("duplicate channel " + c.name);
    std::set<std::string> syms;
    for (const auto& c : n.decls.clocks)
        if (!syms.insert(c).second) out.push_back("duplicate name " + c);
    for (const auto& v : n.decls.ints) {
        if (!syms.insert(v.name).second) out.push_back("duplicate name " + v.name);
        if (v.lo > v.hi) out.push_back("empty range for " + v.name);
        if (v.lo > 0 || v.hi < 0) out.push_back("initial value 0 outside range of " + v.name);
    }
    if (n.instances.empty()) out.push_back("system declares no instances");
    return out;
}

Network make_network(Declarations decls, std::vector<Template> instances) {
    Network n;
    n.decls = std::move(decls);
    n.instances = std::move(instances);
    n.max_constants = compute_max_constants(n.decls, n.instances);
    const auto problems = validate_network(n);
    if (!problems.empty()) {
        std::string msg = "invalid network:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ModelError(msg);
    }
    return n;
}

// ── Candidates ──────────────────────────────────────────────────────────────

namespace {

const Edge& edge_of(const Network& n, const Participant& p) {
    return n.instances[p.instance].edges[p.edge];
}

bool is_committed(const Network& n, std::size_t inst, LocId l) {
    return n.instances[inst].locations[l].kind == LocationKind::Committed;
}

}  // namespace

std::vector<Candidate> enumerate_candidates(const Network& n, const std::vector<LocId>& locs,
                                            const std::vector<std::int32_t>& ints) {
    std::vector<Candidate> out;
    const std::size_t k = n.instances.size();

    auto enabled = [&](std::size_t inst, std::size_t e) {
        const Edge& edge = n.instances[inst].edges[e];
        return edge.source == locs[inst] && holds(edge.guard.ints, ints);
    };
    auto receivers = [&](std::size_t inst, std::size_t ch) {
        std::vector<std::size_t> r;
        const auto& edges = n.instances[inst].edges;
        for (std::size_t f = 0; f < edges.size(); ++f)
            if (edges[f].sync.kind == SyncLabel::Kind::Receive && edges[f].sync.channel == ch &&
                enabled(inst, f))
                r.push_back(f);
        return r;
    };

    for (std::size_t i = 0; i < k; ++i) {
        const auto& edges = n.instances[i].edges;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (!enabled(i, e)) continue;
            const Edge& edge = edges[e];
            switch (edge.sync.kind) {
            case SyncLabel::Kind::Internal:
                out.push_back({TransitionLabel::Kind::Internal, 0, {{i, e}}});
                break;
            case SyncLabel::Kind::Receive:
                break;
            case SyncLabel::Kind::Send: {
                const std::size_t ch = edge.sync.channel;
                if (n.decls.channels[ch].kind == ChannelKind::Binary) {
                    for (std::size_t j = 0; j < k; ++j) {
                        if (j == i) continue;
                        for (auto f : receivers(j, ch))
                            out.push_back({TransitionLabel::Kind::Sync, ch, {{i, e}, {j, f}}});
                    }
                } else {
                    // Every instance with an enabled receiver must join; one
                    // candidate per choice of receiving edge.
                    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> parts;
                    for (std::size_t j = 0; j < k; ++j) {
                        if (j == i) continue;
                        auto r = receivers(j, ch);
                        if (!r.empty()) parts.emplace_back(j, std::move(r));
                    }
                    std::vector<std::size_t> pick(parts.size(), 0);
                    while (true) {
                        Candidate c{TransitionLabel::Kind::Sync, ch, {{i, e}}};
                        for (std::size_t p = 0; p < parts.size(); ++p)
                            c.participants.push_back({parts[p].first, parts[p].second[pick[p]]});
                        out.push_back(std::move(c));
                        bool advanced = false;
                        for (std::size_t p = parts.size(); p-- > 0;) {
                            if (++pick[p] < parts[p].second.size()) {
                                advanced = true;
                                break;
                            }
                            pick[p] = 0;
                        }
                        if (!advanced) break;
                    }
                }
                break;
            }
            }
        }
    }

    bool any_committed = false;
    for (std::size_t i = 0; i < k; ++i) any_committed |= is_committed(n, i, locs[i]);
    if (any_committed) {
        std::erase_if(out, [&](const Candidate& c) {
            return std::none_of(c.participants.begin(), c.participants.end(),
                                [&](const Participant& p) { return is_committed(n, p.instance, locs[p.instance]); });
        });
    }
    return out;
}

bool apply_int_updates(const Network& n, const Candidate& c, std::vector<std::int32_t>& ints) {
    for (const auto& p : c.participants) {
        for (const auto& u : edge_of(n, p).updates) {
            const auto* a = std::get_if<IntAssign>(&u);
            if (!a) continue;
            const std::int64_t v = evaluate(a->expr, ints);
            const auto& decl = n.decls.ints[a->var];
            if (v < decl.lo || v > decl.hi) return false;
            ints[a->var] = static_cast<std::int32_t>(v);
        }
    }
    return true;
}

std::vector<LocId> target_locations(const Network& n, const Candidate& c, std::vector<LocId> locs) {
    for (const auto& p : c.participants) locs[p.instance] = edge_of(n, p).target;
    return locs;
}

std::vector<ClockConstraint> combined_clock_guard(const Network& n, const Candidate& c) {
    std::vector<ClockConstraint> g;
    for (const auto& p : c.participants) {
        const auto& cs = edge_of(n, p).guard.clocks;
        g.insert(g.end(), cs.begin(), cs.end());
    }
    return g;
}

std::vector<ClockAssign> combined_clock_updates(const Network& n, const Candidate& c) {
    std::vector<ClockAssign> out;
    for (const auto& p : c.participants)
        for (const auto& u : edge_of(n, p).updates)
            if (const auto* a = std::get_if<ClockAssign>(&u)) out.push_back(*a);
    return out;
}

std::vector<ClockConstraint> invariant_of(const Network& n, const std::vector<LocId>& locs) {
    std::vector<ClockConstraint> inv;
    for (std::size_t i = 0; i < locs.size(); ++i) {
        const auto& cs = n.instances[i].locations[locs[i]].invariant;
        inv.insert(inv.end(), cs.begin(), cs.end());
    }
    return inv;
}

bool is_urgent(const Network& n, const std::vector<LocId>& locs) {
    for (std::size_t i = 0; i < locs.size(); ++i)
        if (n.instances[i].locations[locs[i]].kind != LocationKind::Normal) return true;
    return false;
}

std::string to_string(const TransitionLabel& t, const Network& n) {
    switch (t.kind) {
    case TransitionLabel::Kind::Delay: return "delay";
    case TransitionLabel::Kind::Internal: {
        const auto& p = t.participants.front();
        const auto& tpl = n.instances[p.instance];
        const auto& e = tpl.edges[p.edge];
        return tpl.name + ": " + tpl.locations[e.source].name + " -> " + tpl.locations[e.target].name;
    }
    case TransitionLabel::Kind::Sync: break;
    }
    std::string s = n.decls.channels[t.channel].name + ": ";
    for (std::size_t k = 0; k < t.participants.size(); ++k) {
        const auto& p = t.participants[k];
        if (k == 1) s += " => ";
        if (k > 1) s += ", ";
        s += n.instances[p.instance].name + (k == 0 ? "!" : "?");
    }
    return s;
}

std::vector<std::string> location_names(const Network& n, const std::vector<LocId>& locs) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < locs.size(); ++i)
        out.push_back(n.instances[i].name + "." + n.instances[i].locations[locs[i]].name);
    return out;
}

// ── Symbolic states ─────────────────────────────────────────────────────────

std::size_t SymbolicState::discrete_hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    auto mix = [&](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (auto l : locs) mix(l);
    for (auto v : ints) mix(std::hash<std::int32_t>{}(v));
    return h;
}

std::size_t SymbolicState::hash() const {
    return discrete_hash() ^ (zone.hash() * 0x100000001b3ull);
}

Dbm delay_close(const Network& n, const std::vector<LocId>& locs, Dbm zone,
                const std::vector<std::int32_t>& max_constants) {
    const auto inv = invariant_of(n, locs);
    zone = dbm_and(std::move(zone), inv);
    if (zone.is_empty()) return zone;
    if (!is_urgent(n, locs)) zone = dbm_and(dbm_up(std::move(zone)), inv);
    return dbm_extrapolate(std::move(zone), max_constants);
}

SymbolicState initial_state(const Network& n) { return initial_state(n, n.max_constants); }

SymbolicState initial_state(const Network& n, const std::vector<std::int32_t>& max_constants) {
    SymbolicState s;
    for (const auto& t : n.instances) s.locs.push_back(t.initial);
    s.ints.assign(n.decls.ints.size(), 0);
    s.zone = delay_close(n, s.locs, dbm_init_zero(n.clock_count()), max_constants);
    if (s.zone.is_empty()) throw ModelError("empty initial state: initial invariants unsatisfiable");
    return s;
}

std::vector<Successor> successors(const Network& n, const SymbolicState& s) {
    return successors(n, s, n.max_constants);
}

std::vector<Successor> successors(const Network& n, const SymbolicState& s,
                                  const std::vector<std::int32_t>& max_constants) {
    std::vector<Successor> out;
    if (s.zone.is_empty()) return out;
    for (auto& c : enumerate_candidates(n, s.locs, s.ints)) {
        Dbm z = dbm_and(s.zone, combined_clock_guard(n, c));
        if (z.is_empty()) continue;
        std::vector<std::int32_t> ints = s.ints;
        if (!apply_int_updates(n, c, ints)) continue;
        for (const auto& a : combined_clock_updates(n, c)) z = dbm_assign(std::move(z), a.clock, a.value);
        auto locs = target_locations(n, c, s.locs);
        z = delay_close(n, locs, std::move(z), max_constants);
        if (z.is_empty()) continue;
        out.push_back({std::move(c), SymbolicState{std::move(locs), std::move(ints), std::move(z)}});
    }
    return out;
}

Dbm pre_update(Dbm z, const std::vector<ClockAssign>& assigns) {
    for (auto it = assigns.rbegin(); it != assigns.rend(); ++it) {
        z = dbm_and(std::move(z), clock_bound(it->clock, CmpOp::Eq, it->value));
        z = dbm_free(std::move(z), it->clock);
    }
    return z;
}

std::vector<Dbm> deadlock_zones(const Network& n, const SymbolicState& s) {
    const auto inv = invariant_of(n, s.locs);
    Dbm zone = dbm_and(s.zone, inv);
    if (zone.is_empty()) return {};
    const bool urgent = is_urgent(n, s.locs);
    if (!urgent) zone = dbm_and(dbm_up(std::move(zone)), inv);
    std::vector<Dbm> stuck{zone};
    for (const auto& c : enumerate_candidates(n, s.locs, s.ints)) {
        std::vector<std::int32_t> ints = s.ints;
        if (!apply_int_updates(n, c, ints)) continue;
        const auto target_inv = invariant_of(n, target_locations(n, c, s.locs));
        Dbm enabled = dbm_and(zone, combined_clock_guard(n, c));
        enabled = dbm_and(std::move(enabled),
                          pre_update(dbm_and(dbm_universe(n.clock_count()), target_inv),
                                     combined_clock_updates(n, c)));
        if (enabled.is_empty()) continue;
        if (!urgent) enabled = dbm_and(dbm_down(std::move(enabled)), zone);
        std::vector<Dbm> next;
        for (const auto& piece : stuck)
            for (auto& rest : dbm_subtract(piece, enabled)) next.push_back(std::move(rest));
        stuck = std::move(next);
        if (stuck.empty()) break;
    }
    return stuck;
}

bool is_deadlock(const Network& n, const SymbolicState& s) { return !deadlock_zones(n, s).empty(); }

}  // namespace tamc
