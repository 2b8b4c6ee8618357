#include "tamc/verifier.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <random>
#include <unordered_map>

namespace tamc {

// ── Printing ────────────────────────────────────────────────────────────────

namespace {

int precedence(StateFormula::Kind k) {
    switch (k) {
    case StateFormula::Kind::Or: return 1;
    case StateFormula::Kind::And: return 2;
    case StateFormula::Kind::Not: return 3;
    default: return 4;
    }
}

std::string print(const StateFormula& f, int parent) {
    using K = StateFormula::Kind;
    std::string s;
    switch (f.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Deadlock: return "deadlock";
    case K::Location: return f.instance + "." + f.name;
    case K::Compare: return f.name + " " + std::string(to_string(f.op)) + " " + std::to_string(f.constant);
    case K::Not: s = "not " + print(f.args[0], precedence(K::Not)); break;
    case K::And: s = print(f.args[0], 2) + " and " + print(f.args[1], 3); break;
    case K::Or: s = print(f.args[0], 1) + " or " + print(f.args[1], 2); break;
    }
    if (precedence(f.kind) < parent) return "(" + s + ")";
    return s;
}

}  // namespace

std::string to_string(const StateFormula& f) { return print(f, 0); }

std::string to_string(const Query& q) {
    switch (q.kind) {
    case Query::Kind::ExistsEventually: return "E<> " + to_string(q.phi);
    case Query::Kind::AlwaysGlobally: return "A[] " + to_string(q.phi);
    case Query::Kind::ExistsGlobally: return "E[] " + to_string(q.phi);
    case Query::Kind::AlwaysEventually: return "A<> " + to_string(q.phi);
    case Query::Kind::LeadsTo: return to_string(q.phi) + " --> " + to_string(q.psi);
    }
    return {};
}

Rational Trace::total_time() const {
    Rational t(0);
    for (const auto& s : steps) t += s.delay;
    return t;
}

// ── Compiled formulas ───────────────────────────────────────────────────────

namespace {

struct LocAtom {
    std::size_t instance;
    LocId loc;
    bool positive;
};

struct Term {
    std::vector<LocAtom> locs;
    std::vector<IntPredicate> ints;
    std::vector<ClockConstraint> clocks;
    std::optional<bool> deadlock;
};

using Dnf = std::vector<Term>;

CmpOp negate(CmpOp op) {
    switch (op) {
    case CmpOp::Lt: return CmpOp::Ge;
    case CmpOp::Le: return CmpOp::Gt;
    case CmpOp::Eq: return CmpOp::Ne;
    case CmpOp::Ne: return CmpOp::Eq;
    case CmpOp::Ge: return CmpOp::Lt;
    case CmpOp::Gt: return CmpOp::Le;
    }
    return op;
}

Term merge(const Term& a, const Term& b) {
    Term t = a;
    t.locs.insert(t.locs.end(), b.locs.begin(), b.locs.end());
    t.ints.insert(t.ints.end(), b.ints.begin(), b.ints.end());
    t.clocks.insert(t.clocks.end(), b.clocks.begin(), b.clocks.end());
    if (b.deadlock) {
        if (t.deadlock && *t.deadlock != *b.deadlock) {
            // Contradictory: deadlock and not deadlock.
            t.locs.push_back({0, 0, true});
            t.locs.push_back({0, 0, false});
        }
        t.deadlock = b.deadlock;
    }
    return t;
}

Dnf to_dnf(const Network& n, const StateFormula& f, bool neg) {
    using K = StateFormula::Kind;
    switch (f.kind) {
    case K::True: return neg ? Dnf{} : Dnf{Term{}};
    case K::False: return neg ? Dnf{Term{}} : Dnf{};
    case K::Deadlock: {
        Term t;
        t.deadlock = !neg;
        return {t};
    }
    case K::Location: {
        auto inst = n.find_instance(f.instance);
        if (!inst) throw NameError("unknown instance '" + f.instance + "'");
        auto loc = n.instances[*inst].find_location(f.name);
        if (!loc) throw NameError("unknown location '" + f.instance + "." + f.name + "'");
        Term t;
        t.locs.push_back({*inst, *loc, !neg});
        return {t};
    }
    case K::Compare: {
        const CmpOp op = neg ? negate(f.op) : f.op;
        if (auto clock = n.decls.find_clock(f.name)) {
            if (op == CmpOp::Ne) {
                Term lt, gt;
                lt.clocks = clock_bound(*clock, CmpOp::Lt, f.constant);
                gt.clocks = clock_bound(*clock, CmpOp::Gt, f.constant);
                return {lt, gt};
            }
            Term t;
            t.clocks = clock_bound(*clock, op, f.constant);
            return {t};
        }
        if (auto var = n.decls.find_int(f.name)) {
            Term t;
            t.ints.push_back({IntExpr::variable(*var), op, IntExpr::constant(f.constant)});
            return {t};
        }
        throw NameError("unknown identifier '" + f.name + "'");
    }
    case K::Not: return to_dnf(n, f.args[0], !neg);
    case K::And:
    case K::Or: {
        const bool conj = (f.kind == K::And) != neg;
        Dnf a = to_dnf(n, f.args[0], neg);
        Dnf b = to_dnf(n, f.args[1], neg);
        if (!conj) {
            a.insert(a.end(), b.begin(), b.end());
            return a;
        }
        Dnf out;
        for (const auto& x : a)
            for (const auto& y : b) out.push_back(merge(x, y));
        return out;
    }
    }
    return {};
}

bool has_clocks(const Dnf& d) {
    return std::any_of(d.begin(), d.end(), [](const Term& t) { return !t.clocks.empty(); });
}

bool has_deadlock(const Dnf& d) {
    return std::any_of(d.begin(), d.end(), [](const Term& t) { return t.deadlock.has_value(); });
}

std::vector<std::int32_t> merged_constants(const Network& n, const std::vector<const Dnf*>& dnfs) {
    auto m = n.max_constants;
    for (const auto* d : dnfs)
        for (const auto& t : *d)
            for (const auto& c : t.clocks) {
                const std::int32_t v = std::abs(c.bound.value());
                m[c.left.index] = std::max(m[c.left.index], v);
                m[c.right.index] = std::max(m[c.right.index], v);
            }
    m[0] = 0;
    return m;
}

class Evaluator {
public:
    struct Match {
        std::size_t term;
        std::vector<Dbm> zones;  // valuations of the state satisfying the term
    };

    explicit Evaluator(const Network& n) : n_(n) {}

    // Zones of s where some valuation is deadlocked; s is delay-closed.
    std::vector<Dbm> deadlocks(const SymbolicState& s) const { return deadlock_zones(n_, s); }

    // First term satisfied by some valuation of s, with a witnessing zone.
    std::optional<Match> first_match(const SymbolicState& s, const Dnf& d) const {
        std::optional<std::vector<Dbm>> dl;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const Term& t = d[k];
            bool ok = std::all_of(t.locs.begin(), t.locs.end(), [&](const LocAtom& a) {
                return (s.locs[a.instance] == a.loc) == a.positive;
            });
            if (!ok || !holds(t.ints, s.ints)) continue;
            Dbm z = dbm_and(s.zone, t.clocks);
            if (z.is_empty()) continue;
            if (!t.deadlock) return Match{k, {std::move(z)}};
            if (!dl) dl = deadlocks(s);
            if (*t.deadlock) {
                Match m{k, {}};
                for (const auto& piece : *dl) {
                    Dbm w = dbm_and(z, piece);
                    if (!w.is_empty()) m.zones.push_back(std::move(w));
                }
                if (!m.zones.empty()) return m;
            } else {
                std::vector<Dbm> rest{z};
                for (const auto& piece : *dl) {
                    std::vector<Dbm> next;
                    for (const auto& r : rest)
                        for (auto& x : dbm_subtract(r, piece)) next.push_back(std::move(x));
                    rest = std::move(next);
                }
                if (!rest.empty()) return Match{k, std::move(rest)};
            }
        }
        return std::nullopt;
    }

    bool holds_some(const SymbolicState& s, const Dnf& d) const { return first_match(s, d).has_value(); }

private:
    const Network& n_;
};

struct StateKeyHash {
    std::size_t operator()(const SymbolicState& s) const { return s.hash(); }
};

}  // namespace

// ── Exploration ─────────────────────────────────────────────────────────────

ExploreResult explore(const Network& n, const StatePredicate& stop, const ExploreOptions& options) {
    return explore(n, n.max_constants, stop, options);
}

ExploreResult explore(const Network& n, const std::vector<std::int32_t>& maxc, const StatePredicate& stop,
                      const ExploreOptions& options) {
    ExploreResult r;
    std::unordered_map<std::size_t, std::vector<std::size_t>> buckets;

    r.states.push_back(initial_state(n, maxc));
    r.parents.push_back({std::nullopt, {}});
    buckets[r.states[0].discrete_hash()].push_back(0);
    r.stats.explored = 1;
    r.stats.stored = 1;
    if (stop(r.states[0])) {
        r.found = 0;
        return r;
    }

    auto subsumed = [&](const SymbolicState& s) {
        auto it = buckets.find(s.discrete_hash());
        if (it == buckets.end()) return false;
        for (auto idx : it->second) {
            const auto& o = r.states[idx];
            if (o.locs == s.locs && o.ints == s.ints && dbm_subset(s.zone, o.zone)) return true;
        }
        return false;
    };

    std::deque<std::size_t> waiting{0};
    r.stats.max_waiting = 1;
    const std::size_t jobs = std::max<std::size_t>(options.jobs, 1);
    const std::size_t batch = jobs == 1 ? 1 : 16 * jobs;

    while (!waiting.empty()) {
        std::vector<std::size_t> current;
        while (!waiting.empty() && current.size() < batch) {
            current.push_back(waiting.front());
            waiting.pop_front();
        }
        std::vector<std::vector<Successor>> succ(current.size());
        if (jobs == 1 || current.size() == 1) {
            for (std::size_t k = 0; k < current.size(); ++k) succ[k] = successors(n, r.states[current[k]], maxc);
        } else {
            std::vector<std::future<void>> tasks;
            const std::size_t chunk = (current.size() + jobs - 1) / jobs;
            for (std::size_t begin = 0; begin < current.size(); begin += chunk) {
                const std::size_t end = std::min(current.size(), begin + chunk);
                tasks.push_back(std::async(std::launch::async, [&, begin, end] {
                    for (std::size_t k = begin; k < end; ++k) succ[k] = successors(n, r.states[current[k]], maxc);
                }));
            }
            for (auto& t : tasks) t.get();
        }
        for (std::size_t k = 0; k < current.size(); ++k) {
            for (auto& s : succ[k]) {
                ++r.stats.explored;
                if (subsumed(s.state)) continue;
                const std::size_t idx = r.states.size();
                buckets[s.state.discrete_hash()].push_back(idx);
                r.states.push_back(std::move(s.state));
                r.parents.push_back({current[k], std::move(s.label)});
                ++r.stats.stored;
                if (r.stats.stored > options.budget)
                    throw BudgetError("state budget of " + std::to_string(options.budget) + " exceeded");
                if (stop(r.states[idx])) {
                    r.found = idx;
                    return r;
                }
                waiting.push_back(idx);
            }
            r.stats.max_waiting = std::max(r.stats.max_waiting, waiting.size() + (current.size() - k - 1));
        }
    }
    return r;
}

// ── Trace concretization ────────────────────────────────────────────────────

namespace {

Rational earliest(const DelayInterval& iv) {
    if (!iv.lo_strict) return iv.lo;
    if (iv.hi) return iv.lo + std::min(Rational(1, 2), (*iv.hi - iv.lo) / 2);
    return iv.lo + Rational(1, 2);
}

Valuation advance(Valuation v, const Rational& d) {
    for (std::size_t i = 1; i < v.size(); ++i) v[i] += d;
    return v;
}

}  // namespace

Trace concretize_path(const Network& n, const std::vector<TransitionLabel>& labels,
                      const std::vector<SymbolicState>& states,
                      const std::vector<ClockConstraint>& goal_constraints) {
    if (states.size() != labels.size() + 1) throw Error("path has mismatched states and labels");
    const std::size_t k = labels.size();
    const std::size_t nclocks = n.clock_count();

    // backward[i]: valuations on entering state i from which the rest of the
    // path (and the goal) is realizable; fire[i]: valuations at which
    // transition i can be taken.
    std::vector<Dbm> backward(k + 1), fire(k);
    auto close_past = [&](Dbm z, const std::vector<LocId>& locs) {
        if (is_urgent(n, locs)) return z;
        return dbm_and(dbm_down(std::move(z)), invariant_of(n, locs));
    };
    Dbm goal = dbm_and(dbm_and(dbm_universe(nclocks), invariant_of(n, states[k].locs)), goal_constraints);
    backward[k] = close_past(goal, states[k].locs);
    for (std::size_t i = k; i-- > 0;) {
        Dbm z = pre_update(backward[i + 1], combined_clock_updates(n, labels[i]));
        z = dbm_and(std::move(z), combined_clock_guard(n, labels[i]));
        z = dbm_and(std::move(z), invariant_of(n, states[i].locs));
        fire[i] = z;
        backward[i] = close_past(std::move(z), states[i].locs);
    }

    Valuation v(nclocks + 1, Rational(0));
    if (!dbm_contains(backward[0], v)) throw Error("internal: path is not realizable from the initial valuation");

    Trace t;
    t.initial_locs = states[0].locs;
    t.initial_ints = states[0].ints;
    t.initial_zone = states[0].zone;
    for (std::size_t i = 0; i < k; ++i) {
        const auto iv = dbm_delay_interval(fire[i], v);
        if (iv.empty) throw Error("internal: no feasible delay on trace step");
        const Rational d = earliest(iv);
        v = advance(std::move(v), d);
        for (const auto& a : combined_clock_updates(n, labels[i])) v[a.clock.index] = Rational(a.value);
        t.steps.push_back({labels[i], states[i + 1].locs, states[i + 1].ints, states[i + 1].zone, d, v});
    }
    const auto iv = dbm_delay_interval(goal, v);
    if (iv.empty) throw Error("internal: goal not reachable by delay");
    const Rational d = earliest(iv);
    if (d > Rational(0)) {
        v = advance(std::move(v), d);
        t.steps.push_back({TransitionLabel{}, states[k].locs, states[k].ints, states[k].zone, d, v});
    }
    return t;
}

Trace reconstruct_trace(const Network& n, const ExploreResult& r, std::size_t goal,
                        const std::vector<ClockConstraint>& goal_constraints) {
    if (goal >= r.states.size()) throw Error("internal: goal state is not in the passed list");
    std::vector<std::size_t> path;
    for (std::optional<std::size_t> cur = goal; cur; cur = r.parents[*cur].parent) path.push_back(*cur);
    std::reverse(path.begin(), path.end());
    std::vector<TransitionLabel> labels;
    std::vector<SymbolicState> states;
    for (std::size_t i = 0; i < path.size(); ++i) {
        states.push_back(r.states[path[i]]);
        if (i > 0) labels.push_back(r.parents[path[i]].label);
    }
    return concretize_path(n, labels, states, goal_constraints);
}

// ── Exact zone graph for liveness ───────────────────────────────────────────

namespace {

struct Graph {
    std::vector<SymbolicState> nodes;
    std::vector<std::vector<std::pair<std::size_t, TransitionLabel>>> succ;
    std::vector<std::optional<std::size_t>> parent;
    std::vector<TransitionLabel> parent_label;
    Stats stats;
};

Graph build_graph(const Network& n, const std::vector<std::int32_t>& maxc, const ExploreOptions& options) {
    Graph g;
    std::unordered_map<SymbolicState, std::size_t, StateKeyHash> index;
    auto add = [&](SymbolicState s, std::optional<std::size_t> parent, TransitionLabel label) {
        auto [it, inserted] = index.try_emplace(s, g.nodes.size());
        if (inserted) {
            g.nodes.push_back(std::move(s));
            g.succ.emplace_back();
            g.parent.push_back(parent);
            g.parent_label.push_back(std::move(label));
            if (g.nodes.size() > options.budget)
                throw BudgetError("state budget of " + std::to_string(options.budget) + " exceeded");
        }
        return std::pair{it->second, inserted};
    };
    add(initial_state(n, maxc), std::nullopt, {});
    g.stats.explored = 1;
    std::deque<std::size_t> waiting{0};
    g.stats.max_waiting = 1;
    while (!waiting.empty()) {
        const std::size_t cur = waiting.front();
        waiting.pop_front();
        for (auto& s : successors(n, g.nodes[cur], maxc)) {
            ++g.stats.explored;
            auto label = s.label;
            auto [idx, fresh] = add(std::move(s.state), cur, label);
            g.succ[cur].emplace_back(idx, std::move(label));
            if (fresh) waiting.push_back(idx);
        }
        g.stats.max_waiting = std::max(g.stats.max_waiting, waiting.size());
    }
    g.stats.stored = g.nodes.size();
    return g;
}

bool time_divergent(const Network& n, const SymbolicState& s) {
    if (is_urgent(n, s.locs)) return false;
    for (std::size_t i = 1; i < s.zone.dimension(); ++i)
        if (!s.zone.at(i, 0).is_unbounded()) return false;
    return true;
}

// Nodes inside `allowed` from which some maximal run stays inside `allowed`
// forever: it reaches a cycle, a state without successors, or a state that
// may let time pass forever.
struct BadInfo {
    std::vector<bool> bad;
    std::vector<bool> terminal;
    std::vector<std::size_t> scc;
    std::vector<bool> cyclic;  // per scc id
    std::vector<std::size_t> dist;
};

BadInfo find_bad(const Network& n, const Graph& g, const std::vector<bool>& allowed) {
    const std::size_t N = g.nodes.size();
    BadInfo info;
    info.bad.assign(N, false);
    info.terminal.assign(N, false);
    info.scc.assign(N, SIZE_MAX);
    info.dist.assign(N, SIZE_MAX);

    // Iterative Tarjan restricted to allowed nodes.
    std::vector<std::size_t> low(N), num(N, SIZE_MAX), stack;
    std::vector<bool> on_stack(N, false);
    std::size_t counter = 0, scc_count = 0;
    for (std::size_t root = 0; root < N; ++root) {
        if (!allowed[root] || num[root] != SIZE_MAX) continue;
        std::vector<std::pair<std::size_t, std::size_t>> call{{root, 0}};
        num[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, pos] = call.back();
            if (pos < g.succ[v].size()) {
                const std::size_t w = g.succ[v][pos++].first;
                if (!allowed[w]) continue;
                if (num[w] == SIZE_MAX) {
                    num[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], num[w]);
                }
                continue;
            }
            if (low[v] == num[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    info.scc[w] = scc_count;
                } while (w != v);
                ++scc_count;
            }
            const std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    info.cyclic.assign(scc_count, false);
    std::vector<std::size_t> scc_size(scc_count, 0);
    for (std::size_t v = 0; v < N; ++v)
        if (allowed[v]) ++scc_size[info.scc[v]];
    for (std::size_t v = 0; v < N; ++v) {
        if (!allowed[v]) continue;
        if (scc_size[info.scc[v]] > 1) info.cyclic[info.scc[v]] = true;
        for (const auto& [w, _] : g.succ[v])
            if (w == v) info.cyclic[info.scc[v]] = true;
    }

    std::vector<std::vector<std::size_t>> pred(N);
    for (std::size_t v = 0; v < N; ++v)
        for (const auto& [w, _] : g.succ[v])
            if (allowed[v] && allowed[w]) pred[w].push_back(v);

    std::deque<std::size_t> queue;
    for (std::size_t v = 0; v < N; ++v) {
        if (!allowed[v]) continue;
        info.terminal[v] = g.succ[v].empty() || time_divergent(n, g.nodes[v]) || is_deadlock(n, g.nodes[v]);
        if (info.terminal[v] || info.cyclic[info.scc[v]]) {
            info.bad[v] = true;
            info.dist[v] = 0;
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (auto u : pred[v]) {
            if (info.bad[u]) continue;
            info.bad[u] = true;
            info.dist[u] = info.dist[v] + 1;
            queue.push_back(u);
        }
    }
    return info;
}

// Labels and node sequence from the initial node to `target` along BFS parents.
void tree_path(const Graph& g, std::size_t target, std::vector<std::size_t>& nodes,
               std::vector<TransitionLabel>& labels) {
    std::vector<std::size_t> rev;
    for (std::optional<std::size_t> cur = target; cur; cur = g.parent[*cur]) rev.push_back(*cur);
    std::reverse(rev.begin(), rev.end());
    for (std::size_t i = 0; i < rev.size(); ++i) {
        nodes.push_back(rev[i]);
        if (i > 0) labels.push_back(g.parent_label[rev[i]]);
    }
}

// Extends a path ending in a bad node to a terminal node or around a cycle.
// Returns the loop start (index into labels) for cycles.
std::optional<std::size_t> extend_bad(const Graph& g, const BadInfo& info, const std::vector<bool>& allowed,
                                      std::vector<std::size_t>& nodes, std::vector<TransitionLabel>& labels) {
    std::size_t v = nodes.back();
    while (info.dist[v] > 0) {
        for (const auto& [w, label] : g.succ[v]) {
            if (allowed[w] && info.bad[w] && info.dist[w] + 1 == info.dist[v]) {
                nodes.push_back(w);
                labels.push_back(label);
                v = w;
                break;
            }
        }
    }
    if (info.terminal[v]) return std::nullopt;
    // BFS inside the SCC back to v.
    const std::size_t comp = info.scc[v];
    std::unordered_map<std::size_t, std::pair<std::size_t, const TransitionLabel*>> prev;
    std::deque<std::size_t> q;
    for (const auto& [w, label] : g.succ[v]) {
        if (!allowed[w] || info.scc[w] != comp || prev.count(w)) continue;
        prev[w] = {v, &label};
        q.push_back(w);
    }
    std::optional<std::size_t> hit;
    if (prev.count(v)) hit = v;
    while (!hit && !q.empty()) {
        const std::size_t u = q.front();
        q.pop_front();
        for (const auto& [w, label] : g.succ[u]) {
            if (!allowed[w] || info.scc[w] != comp || prev.count(w)) continue;
            prev[w] = {u, &label};
            if (w == v) {
                hit = v;
                break;
            }
            q.push_back(w);
        }
    }
    const std::size_t loop_start = labels.size();
    std::vector<std::pair<std::size_t, TransitionLabel>> cycle;
    std::size_t cur = v;
    do {
        const auto& [p, label] = prev.at(cur);
        cycle.emplace_back(cur, *label);
        cur = p;
    } while (cur != v);
    std::reverse(cycle.begin(), cycle.end());
    for (auto& [node, label] : cycle) {
        nodes.push_back(node);
        labels.push_back(std::move(label));
    }
    return loop_start;
}

Trace graph_trace(const Network& n, const Graph& g, const std::vector<std::size_t>& nodes,
                  const std::vector<TransitionLabel>& labels, std::optional<std::size_t> loop_start) {
    std::vector<SymbolicState> states;
    for (auto v : nodes) states.push_back(g.nodes[v]);
    Trace t = concretize_path(n, labels, states);
    t.loop_start = loop_start;
    t.deadlock = g.succ[nodes.back()].empty();
    return t;
}

}  // namespace

// ── check ───────────────────────────────────────────────────────────────────

Verdict check(const Network& n, const Query& q, const ExploreOptions& options) {
    Verdict v;
    using QK = Query::Kind;

    if (q.kind == QK::ExistsEventually || q.kind == QK::AlwaysGlobally) {
        const bool negated = q.kind == QK::AlwaysGlobally;
        const Dnf target = to_dnf(n, q.phi, negated);
        const auto maxc = merged_constants(n, {&target});
        const Evaluator eval(n);
        auto r = explore(n, maxc, [&](const SymbolicState& s) { return eval.holds_some(s, target); }, options);
        v.stats = r.stats;
        v.satisfied = r.found.has_value() != negated;
        if (r.found) {
            const auto match = eval.first_match(r.states[*r.found], target);
            // Zones come from the extrapolated state; at least one of them
            // meets the exact path zone, the others may not.
            std::optional<Trace> found;
            for (const auto& z : match->zones) {
                try {
                    found = reconstruct_trace(n, r, *r.found, dbm_constraints(z));
                    break;
                } catch (const Error&) {
                }
            }
            if (!found) throw Error("internal: witness could not be concretized");
            Trace t = std::move(*found);
            t.deadlock = !eval.deadlocks(r.states[*r.found]).empty();
            v.witness = std::move(t);
        }
        return v;
    }

    const Dnf phi = to_dnf(n, q.phi, false);
    const Dnf psi = q.kind == QK::LeadsTo ? to_dnf(n, q.psi, false) : Dnf{};
    if (has_clocks(phi) || has_clocks(psi))
        throw ModelError("clock comparisons are supported only under E<> and A[]");
    if (q.kind == QK::LeadsTo && (has_deadlock(phi) || has_deadlock(psi)))
        throw ModelError("deadlock cannot appear in a leads-to property");

    const auto& maxc = n.max_constants;
    const Graph g = build_graph(n, maxc, options);
    const Evaluator eval(n);
    v.stats = g.stats;
    const std::size_t N = g.nodes.size();

    std::vector<bool> phi_holds(N), allowed(N);
    for (std::size_t i = 0; i < N; ++i) phi_holds[i] = eval.holds_some(g.nodes[i], phi);

    std::optional<std::size_t> start;
    switch (q.kind) {
    case QK::ExistsGlobally:
    case QK::AlwaysEventually: {
        // E[] phi, and A<> phi as the negation of E[] not phi.
        const bool eg = q.kind == QK::ExistsGlobally;
        for (std::size_t i = 0; i < N; ++i) allowed[i] = eg ? phi_holds[i] : !phi_holds[i];
        const auto info = find_bad(n, g, allowed);
        const bool exists = allowed[0] && info.bad[0];
        v.satisfied = eg ? exists : !exists;
        if (exists) start = 0;
        if (start) {
            std::vector<std::size_t> nodes{0};
            std::vector<TransitionLabel> labels;
            auto loop = extend_bad(g, info, allowed, nodes, labels);
            v.witness = graph_trace(n, g, nodes, labels, loop);
        }
        return v;
    }
    case QK::LeadsTo: {
        v.zeno_caveat = true;
        for (std::size_t i = 0; i < N; ++i) allowed[i] = !eval.holds_some(g.nodes[i], psi);
        const auto info = find_bad(n, g, allowed);
        for (std::size_t i = 0; i < N && !start; ++i)
            if (phi_holds[i] && allowed[i] && info.bad[i]) start = i;
        v.satisfied = !start;
        if (start) {
            std::vector<std::size_t> nodes;
            std::vector<TransitionLabel> labels;
            tree_path(g, *start, nodes, labels);
            auto loop = extend_bad(g, info, allowed, nodes, labels);
            v.witness = graph_trace(n, g, nodes, labels, loop);
        }
        return v;
    }
    default: break;
    }
    return v;
}

// ── Simulation ──────────────────────────────────────────────────────────────

Trace simulate(const Network& n, std::uint64_t seed, std::size_t steps) {
    std::mt19937_64 rng(seed);
    const std::size_t nclocks = n.clock_count();
    const std::int32_t cap = *std::max_element(n.max_constants.begin(), n.max_constants.end()) + 1;

    Trace t;
    std::vector<LocId> locs;
    for (const auto& tpl : n.instances) locs.push_back(tpl.initial);
    std::vector<std::int32_t> ints(n.decls.ints.size(), 0);
    Valuation v(nclocks + 1, Rational(0));
    t.initial_locs = locs;
    t.initial_ints = ints;
    if (!dbm_contains(dbm_and(dbm_universe(nclocks), invariant_of(n, locs)), v))
        throw ModelError("empty initial state: initial invariants unsatisfiable");

    for (std::size_t step = 0; step < steps; ++step) {
        struct Option {
            Candidate c;
            DelayInterval iv;
            std::vector<std::int32_t> ints;
        };
        std::vector<Option> options;
        const bool urgent = is_urgent(n, locs);
        const auto inv = invariant_of(n, locs);
        for (auto& c : enumerate_candidates(n, locs, ints)) {
            auto next_ints = ints;
            if (!apply_int_updates(n, c, next_ints)) continue;
            Dbm fire = dbm_and(dbm_and(dbm_universe(nclocks), inv), combined_clock_guard(n, c));
            const auto target_inv = invariant_of(n, target_locations(n, c, locs));
            fire = dbm_and(std::move(fire),
                           pre_update(dbm_and(dbm_universe(nclocks), target_inv), combined_clock_updates(n, c)));
            auto iv = dbm_delay_interval(fire, v);
            if (iv.empty) continue;
            if (urgent) {
                if (!iv.contains(Rational(0))) continue;
                iv = DelayInterval{false, Rational(0), false, Rational(0), false};
            }
            options.push_back({std::move(c), iv, std::move(next_ints)});
        }
        if (options.empty()) {
            t.deadlock = true;
            break;
        }
        auto& pick = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
        const Rational lo = pick.iv.lo;
        Rational hi = lo >= Rational(cap) ? lo + 1 : Rational(cap);
        if (pick.iv.hi) hi = *pick.iv.hi;
        // Sample on a grid of eighths of the feasible interval.
        std::vector<Rational> grid;
        for (int k = 0; k <= 8; ++k) {
            const Rational d = lo + (hi - lo) * Rational(k, 8);
            if (pick.iv.contains(d)) grid.push_back(d);
        }
        if (grid.empty()) grid.push_back(lo + (hi - lo) / 2);
        const Rational d = grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng)];
        v = advance(std::move(v), d);
        for (const auto& a : combined_clock_updates(n, pick.c)) v[a.clock.index] = Rational(a.value);
        locs = target_locations(n, pick.c, locs);
        ints = std::move(pick.ints);
        t.steps.push_back({std::move(pick.c), locs, ints, std::nullopt, d, v});
    }
    return t;
}

// ── JSON ────────────────────────────────────────────────────────────────────

namespace {

std::string valuation_string(const Network& n, const Valuation& v) {
    std::string s;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (i > 1) s += " && ";
        s += n.decls.clocks[i - 1] + "==" + to_string(v[i]);
    }
    return s.empty() ? "true" : s;
}

nlohmann::ordered_json step_json(const Network& n, const std::string& label, const Rational& delay,
                                 const Rational& time, const std::vector<LocId>& locs,
                                 const std::vector<std::int32_t>& ints, const std::optional<Dbm>& zone,
                                 const Valuation& val) {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["delay"] = to_string(delay);
    j["time"] = to_string(time);
    j["locations"] = location_names(n, locs);
    if (!ints.empty()) {
        nlohmann::ordered_json vars;
        for (std::size_t i = 0; i < ints.size(); ++i) vars[n.decls.ints[i].name] = ints[i];
        j["variables"] = vars;
    }
    j["zone"] = zone ? dbm_to_string(*zone, n.decls.clocks) : valuation_string(n, val);
    j["valuation"] = valuation_string(n, val);
    return j;
}

}  // namespace

nlohmann::ordered_json initial_to_json(const Network& n, const Trace& t) {
    auto j = step_json(n, "initial", Rational(0), Rational(0), t.initial_locs, t.initial_ints, t.initial_zone,
                       Valuation(n.clock_count() + 1, Rational(0)));
    j.erase("label");
    j.erase("delay");
    return j;
}

nlohmann::ordered_json trace_to_json(const Network& n, const Trace& t) {
    auto steps = nlohmann::ordered_json::array();
    Rational time(0);
    for (const auto& s : t.steps) {
        time += s.delay;
        steps.push_back(step_json(n, to_string(s.label, n), s.delay, time, s.locs, s.ints, s.zone, s.valuation));
    }
    return steps;
}

nlohmann::ordered_json verdict_to_json(const Network& n, const Query& q, const Verdict& v) {
    nlohmann::ordered_json j;
    j["query"] = to_string(q);
    j["satisfied"] = v.satisfied;
    j["stats"] = {{"explored", v.stats.explored}, {"stored", v.stats.stored}, {"max_waiting", v.stats.max_waiting}};
    if (v.witness) j["initial"] = initial_to_json(n, *v.witness);
    j["trace"] = v.witness ? trace_to_json(n, *v.witness) : nlohmann::ordered_json::array();
    if (v.witness && v.witness->loop_start) j["loop_start"] = *v.witness->loop_start;
    if (v.witness) j["deadlock"] = v.witness->deadlock;
    if (v.zeno_caveat) j["zeno_runs_excluded"] = false;
    return j;
}

}  // namespace tamc
