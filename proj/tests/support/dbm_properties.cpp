#include "dbm_properties.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

namespace tamc::testkit {

namespace {

bool below(const Rational& lhs, Bound b) {
    if (b.is_unbounded()) return true;
    Rational c(b.value());
    return b.is_strict() ? lhs < c : lhs <= c;
}

Rational value_of(const Valuation& v, ClockId x) { return x.is_zero() ? Rational(0) : v[x.index]; }

// Feasible set of a single real parameter, lower bound starting at 0.
struct Interval {
    Rational lo{0};
    bool lo_strict = false;
    std::optional<Rational> hi;
    bool hi_strict = false;

    void lower(const Rational& v, bool strict) {
        if (v > lo || (v == lo && strict)) {
            lo = v;
            lo_strict = strict;
        }
    }
    void upper(const Rational& v, bool strict) {
        if (!hi || v < *hi || (v == *hi && strict)) {
            hi = v;
            hi_strict = strict;
        }
    }
    bool nonempty() const { return !hi || lo < *hi || (lo == *hi && !lo_strict && !hi_strict); }
};

// v - d lies in the zone for some d >= 0 with v - d >= 0.
bool in_past_of(const std::vector<ClockConstraint>& cs, const Valuation& v) {
    Interval d;
    for (std::size_t i = 1; i < v.size(); ++i) d.upper(v[i], false);
    for (const auto& c : cs) {
        if (c.bound.is_unbounded()) continue;
        Rational k(c.bound.value());
        bool strict = c.bound.is_strict();
        if (!c.left.is_zero() && !c.right.is_zero()) {
            if (!below(v[c.left.index] - v[c.right.index], c.bound)) return false;
        } else if (!c.left.is_zero()) {
            d.lower(v[c.left.index] - k, strict);
        } else if (!c.right.is_zero()) {
            d.upper(k + v[c.right.index], strict);
        } else if (!below(Rational(0), c.bound)) {
            return false;
        }
    }
    return d.nonempty();
}

// v + d lies in the zone for some d >= 0.
bool in_future_of(const std::vector<ClockConstraint>& cs, const Valuation& v) {
    Interval d;
    for (const auto& c : cs) {
        if (c.bound.is_unbounded()) continue;
        Rational k(c.bound.value());
        bool strict = c.bound.is_strict();
        if (!c.left.is_zero() && !c.right.is_zero()) {
            if (!below(v[c.left.index] - v[c.right.index], c.bound)) return false;
        } else if (!c.left.is_zero()) {
            d.upper(k - v[c.left.index], strict);
        } else if (!c.right.is_zero()) {
            d.lower(-k - v[c.right.index], strict);
        } else if (!below(Rational(0), c.bound)) {
            return false;
        }
    }
    return d.nonempty();
}

// v with clock x replaced by some t >= 0 lies in the zone.
bool in_zone_for_some_value(const std::vector<ClockConstraint>& cs, const Valuation& v, ClockId x) {
    Interval t;
    for (const auto& c : cs) {
        if (c.bound.is_unbounded()) continue;
        Rational k(c.bound.value());
        bool strict = c.bound.is_strict();
        if (c.left == x) {
            t.upper(k + value_of(v, c.right), strict);
        } else if (c.right == x) {
            t.lower(value_of(v, c.left) - k, strict);
        } else if (!below(value_of(v, c.left) - value_of(v, c.right), c.bound)) {
            return false;
        }
    }
    return t.nonempty();
}

std::string render(const Valuation& v) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 1; i < v.size(); ++i) out << (i > 1 ? ", " : "") << to_string(v[i]);
    out << ")";
    return out.str();
}

struct Sampler {
    std::mt19937_64 rng;

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    std::size_t clocks() { return static_cast<std::size_t>(uniform(1, 3)); }

    ClockConstraint constraint(std::size_t n) {
        std::size_t l = static_cast<std::size_t>(uniform(0, static_cast<int>(n)));
        std::size_t r = l;
        while (r == l) r = static_cast<std::size_t>(uniform(0, static_cast<int>(n)));
        // Lower bounds on single clocks are negative entries in row 0.
        int v = (l == 0) ? uniform(-6, 1) : uniform(-2, 6);
        Bound b = uniform(0, 1) ? Bound::strict(v) : Bound::weak(v);
        return {ClockId{l}, ClockId{r}, b};
    }

    std::vector<ClockConstraint> constraints(std::size_t n) {
        std::vector<ClockConstraint> cs;
        int k = uniform(0, 4);
        for (int i = 0; i < k; ++i) cs.push_back(constraint(n));
        return cs;
    }

    Valuation point(std::size_t n) {
        Valuation v(n + 1, Rational(0));
        for (std::size_t i = 1; i <= n; ++i) {
            int den = uniform(1, 3);
            v[i] = Rational(uniform(0, 8 * den), den);
        }
        return v;
    }
};

// Zone from a raw constraint list via unclosed writes and one closure.
Dbm build(std::size_t n, const std::vector<ClockConstraint>& cs) {
    Dbm z = dbm_universe(n);
    for (const auto& c : cs) z.set(c.left.index, c.right.index, std::min(z.at(c.left.index, c.right.index), c.bound));
    return dbm_canonicalize(z);
}

std::vector<ClockConstraint> with_nonnegativity(std::size_t n, std::vector<ClockConstraint> cs) {
    for (std::size_t i = 1; i <= n; ++i) cs.push_back({ClockId::zero(), ClockId{i}, Bound::weak(0)});
    return cs;
}

using PointCheck = std::function<std::optional<std::string>(Sampler&)>;

PropertyReport run(const std::string& name, std::size_t samples, Sampler& s, const PointCheck& check) {
    PropertyReport r{name, 0, 0, {}};
    for (std::size_t i = 0; i < samples; ++i) {
        ++r.samples;
        if (auto failure = check(s)) {
            if (r.failures++ == 0) r.first_failure = *failure;
        }
    }
    return r;
}

}  // namespace

bool satisfies_all(const std::vector<ClockConstraint>& cs, const Valuation& v) {
    for (const auto& c : cs)
        if (!below(value_of(v, c.left) - value_of(v, c.right), c.bound)) return false;
    return true;
}

bool matrix_contains(const Dbm& z, const Valuation& v) {
    if (z.is_empty()) return false;
    for (std::size_t i = 0; i < z.dimension(); ++i)
        for (std::size_t j = 0; j < z.dimension(); ++j)
            if (!below(v[i] - v[j], z.at(i, j))) return false;
    return true;
}

std::vector<PropertyReport> run_dbm_properties(std::uint64_t seed, std::size_t samples) {
    Sampler s{std::mt19937_64(seed)};
    std::vector<PropertyReport> out;

    auto mismatch = [](const char* what, const Valuation& v, bool expected) -> std::optional<std::string> {
        return std::string(what) + " at " + render(v) + ": expected " + (expected ? "member" : "non-member");
    };

    out.push_back(run("canonicalize membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        Dbm z = build(n, cs);
        Valuation v = s.point(n);
        bool expected = satisfies_all(cs, v);
        if (matrix_contains(z, v) != expected) return mismatch("canonicalize", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("and membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        ClockConstraint c = s.constraint(n);
        Dbm z = dbm_and(build(n, cs), c);
        Valuation v = s.point(n);
        bool expected = satisfies_all(cs, v) && satisfies_all({c}, v);
        if (matrix_contains(z, v) != expected) return mismatch("and", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("zone intersection membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto a = with_nonnegativity(n, s.constraints(n));
        auto b = with_nonnegativity(n, s.constraints(n));
        Dbm z = dbm_and(build(n, a), build(n, b));
        Valuation v = s.point(n);
        bool expected = satisfies_all(a, v) && satisfies_all(b, v);
        if (matrix_contains(z, v) != expected) return mismatch("intersection", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("up membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        Dbm z = dbm_up(build(n, cs));
        Valuation v = s.point(n);
        bool expected = in_past_of(cs, v);
        if (matrix_contains(z, v) != expected) return mismatch("up", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("down membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        Dbm z = dbm_down(build(n, cs));
        Valuation v = s.point(n);
        bool expected = in_future_of(cs, v);
        if (matrix_contains(z, v) != expected) return mismatch("down", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("assign membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        ClockId x{static_cast<std::size_t>(s.uniform(1, static_cast<int>(n)))};
        std::int32_t value = s.uniform(0, 5);
        Dbm z = dbm_assign(build(n, cs), x, value);
        Valuation v = s.point(n);
        if (s.uniform(0, 1)) v[x.index] = Rational(value);
        bool expected = v[x.index] == Rational(value) && in_zone_for_some_value(cs, v, x);
        if (matrix_contains(z, v) != expected) return mismatch("assign", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("free membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        ClockId x{static_cast<std::size_t>(s.uniform(1, static_cast<int>(n)))};
        Dbm z = dbm_free(build(n, cs), x);
        Valuation v = s.point(n);
        bool expected = in_zone_for_some_value(cs, v, x);
        if (matrix_contains(z, v) != expected) return mismatch("free", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("subtract membership", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto a = with_nonnegativity(n, s.constraints(n));
        auto b = with_nonnegativity(n, s.constraints(n));
        auto pieces = dbm_subtract(build(n, a), build(n, b));
        Valuation v = s.point(n);
        bool expected = satisfies_all(a, v) && !satisfies_all(b, v);
        std::size_t hits = 0;
        for (const auto& p : pieces) hits += matrix_contains(p, v);
        if (hits > 1) return "subtract pieces overlap at " + render(v);
        if ((hits == 1) != expected) return mismatch("subtract", v, expected);
        return std::nullopt;
    }));

    out.push_back(run("extrapolate soundness", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto cs = with_nonnegativity(n, s.constraints(n));
        std::vector<std::int32_t> maxc(n + 1, 0);
        for (std::size_t i = 1; i <= n; ++i) maxc[i] = s.uniform(0, 6);
        Dbm z = build(n, cs);
        Dbm e = dbm_extrapolate(z, maxc);
        Valuation v = s.point(n);
        if (satisfies_all(cs, v) && !matrix_contains(e, v)) return "extrapolation lost " + render(v);
        // Bounds within the constants are kept: points of the abstraction
        // whose clocks stay at or below their constants were already in z.
        bool small = true;
        for (std::size_t i = 1; i <= n; ++i) small = small && v[i] <= Rational(maxc[i]);
        bool diagonal_free = std::all_of(cs.begin(), cs.end(), [](const ClockConstraint& c) {
            return c.left.is_zero() || c.right.is_zero();
        });
        if (small && diagonal_free && matrix_contains(e, v) != satisfies_all(cs, v))
            return "extrapolation changed a point below the constants: " + render(v);
        return std::nullopt;
    }));

    out.push_back(run("subset agrees with sampled inclusion", samples, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        auto a = with_nonnegativity(n, s.constraints(n));
        auto b = with_nonnegativity(n, s.constraints(n));
        Dbm za = build(n, a), zb = build(n, b);
        Valuation v = s.point(n);
        if (dbm_subset(za, zb) && satisfies_all(a, v) && !satisfies_all(b, v))
            return "subset claimed but " + render(v) + " separates the zones";
        // A failed inclusion must be witnessed by a non-empty difference.
        if (!dbm_subset(za, zb) && dbm_subtract(za, zb).empty()) return std::string("subset refuted without witness");
        return std::nullopt;
    }));

    // ── Algebraic laws ──
    out.push_back(run("canonicalize and up idempotent", samples / 10, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        Dbm z = build(n, s.constraints(n));
        Dbm c = dbm_canonicalize(z);
        if (c.matrix() != z.matrix() || c.is_empty() != z.is_empty()) return std::string("canonicalize not idempotent");
        if (!z.is_empty() && dbm_up(dbm_up(z)).matrix() != dbm_up(z).matrix()) return std::string("up not idempotent");
        return std::nullopt;
    }));

    out.push_back(run("subset partial order", samples / 10, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        Dbm a = build(n, s.constraints(n));
        Dbm b = dbm_and(a, s.constraint(n));   // b within a
        Dbm c = dbm_and(b, s.constraint(n));   // c within b
        if (!dbm_subset(a, a)) return std::string("subset not reflexive");
        if (!dbm_subset(b, a) || !dbm_subset(c, b)) return std::string("intersection not a subset");
        if (!dbm_subset(c, a)) return std::string("subset not transitive");
        if (dbm_subset(a, b) && dbm_subset(b, a) && !(a == b)) return std::string("subset not antisymmetric");
        Dbm d = build(n, s.constraints(n));
        if (dbm_subset(a, d) && dbm_subset(d, a) && !(a == d)) return std::string("subset not antisymmetric");
        return std::nullopt;
    }));

    out.push_back(run("negation involution", samples / 10, s, [&](Sampler& s) -> std::optional<std::string> {
        std::size_t n = s.clocks();
        ClockConstraint c = s.constraint(n);
        if (!(negate_constraint(negate_constraint(c)) == c)) return std::string("negation not an involution");
        Valuation v = s.point(n);
        if (satisfies_all({c}, v) == satisfies_all({negate_constraint(c)}, v))
            return "negation does not complement at " + render(v);
        return std::nullopt;
    }));

    return out;
}

}  // namespace tamc::testkit
