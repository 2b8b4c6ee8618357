#include "tamc/dbm.hpp"

#include "tamc/errors.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace tamc {

namespace {

constexpr Bound::raw_type kLeZero = Bound::zero().raw();

Bound::raw_type add(Bound::raw_type a, Bound::raw_type b) {
    return (Bound::from_raw(a) + Bound::from_raw(b)).raw();
}

void require_clock(const Dbm& z, ClockId x) {
    if (x.index >= z.dimension())
        throw DimensionError("clock index " + std::to_string(x.index) +
                             " outside zone of dimension " + std::to_string(z.dimension()));
}

}  // namespace

Dbm::Dbm(std::size_t dim) : m_(Matrix::Constant(static_cast<Eigen::Index>(std::max<std::size_t>(dim, 1)),
                                                static_cast<Eigen::Index>(std::max<std::size_t>(dim, 1)),
                                                Bound::kInfinityRaw)) {
    m_.row(0).setConstant(kLeZero);
    m_.diagonal().setConstant(kLeZero);
}

void Dbm::set(std::size_t i, std::size_t j, Bound b) {
    m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = b.raw();
    canonical_ = false;
}

bool operator==(const Dbm& a, const Dbm& b) {
    if (a.dimension() != b.dimension()) return false;
    if (a.empty_ || b.empty_) return a.empty_ && b.empty_;
    return a.m_ == b.m_;
}

std::size_t Dbm::hash() const {
    if (empty_) return 0x9e3779b9u;
    std::size_t h = dimension();
    for (Eigen::Index k = 0; k < m_.size(); ++k)
        h ^= std::hash<Bound::raw_type>{}(m_.data()[k]) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

Dbm dbm_empty(std::size_t dim) {
    Dbm z(dim);
    z.empty_ = true;
    return z;
}

Dbm dbm_universe(std::size_t clocks) { return Dbm(clocks + 1); }

Dbm dbm_init_zero(std::size_t clocks) {
    Dbm z(clocks + 1);
    for (std::size_t i = 1; i <= clocks; ++i)
        for (std::size_t j = 0; j <= clocks; ++j) z.set(i, j, Bound::zero());
    return dbm_canonicalize(std::move(z));
}

Dbm dbm_canonicalize(Dbm z) {
    if (z.empty_) return z;
    auto& m = z.m_;
    const Eigen::Index n = m.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto ik = m(i, k);
            if (ik == Bound::kInfinityRaw) continue;
            for (Eigen::Index j = 0; j < n; ++j) {
                const auto via = add(ik, m(k, j));
                if (via < m(i, j)) m(i, j) = via;
            }
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (m(i, i) < kLeZero) {
                z.empty_ = true;
                z.canonical_ = true;
                return z;
            }
        }
    }
    z.canonical_ = true;
    return z;
}

Dbm dbm_up(Dbm z) {
    if (z.is_empty()) return z;
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    for (std::size_t i = 1; i < z.dimension(); ++i) z.set(i, 0, Bound::unbounded());
    // Removing upper bounds keeps a closed matrix closed.
    return dbm_canonicalize(std::move(z));
}

Dbm dbm_down(Dbm z) {
    if (z.is_empty()) return z;
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    const std::size_t n = z.dimension();
    for (std::size_t j = 1; j < n; ++j) {
        Bound b = Bound::zero();
        for (std::size_t i = 1; i < n; ++i) b = std::min(b, z.at(i, j));
        z.set(0, j, b);
    }
    return dbm_canonicalize(std::move(z));
}

Dbm dbm_and(Dbm z, const ClockConstraint& c) {
    require_clock(z, c.left);
    require_clock(z, c.right);
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    if (z.is_empty()) return z;
    const std::size_t i = c.left.index;
    const std::size_t j = c.right.index;
    if (c.bound >= z.at(i, j)) return z;
    if (z.at(j, i) + c.bound < Bound::zero()) return dbm_empty(z.dimension());
    // Incremental closure through the tightened edge i -> j.
    const std::size_t n = z.dimension();
    Dbm out = z;
    for (std::size_t p = 0; p < n; ++p) {
        const Bound pi = z.at(p, i);
        if (pi.is_unbounded()) continue;
        for (std::size_t q = 0; q < n; ++q) {
            const Bound via = pi + c.bound + z.at(j, q);
            if (via < out.at(p, q)) out.set(p, q, via);
        }
    }
    return dbm_canonicalize(std::move(out));
}

Dbm dbm_and(Dbm z, const std::vector<ClockConstraint>& cs) {
    for (const auto& c : cs) {
        z = dbm_and(std::move(z), c);
        if (z.is_empty()) break;
    }
    return z;
}

Dbm dbm_and(Dbm a, const Dbm& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("zone dimensions differ");
    if (a.is_empty()) return a;
    if (b.is_empty()) return dbm_empty(a.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i)
        for (std::size_t j = 0; j < a.dimension(); ++j)
            if (b.at(i, j) < a.at(i, j)) a.set(i, j, b.at(i, j));
    return dbm_canonicalize(std::move(a));
}

Dbm dbm_assign(Dbm z, ClockId x, std::int32_t v) {
    require_clock(z, x);
    if (x.is_zero()) throw DomainError("cannot assign the reference clock");
    if (v < 0) throw DomainError("clock assignment must be non-negative");
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    if (z.is_empty()) return z;
    const std::size_t k = x.index;
    for (std::size_t j = 0; j < z.dimension(); ++j) {
        if (j == k) continue;
        z.set(k, j, Bound::weak(v) + z.at(0, j));
        z.set(j, k, z.at(j, 0) + Bound::weak(-v));
    }
    return dbm_canonicalize(std::move(z));
}

Dbm dbm_free(Dbm z, ClockId x) {
    require_clock(z, x);
    if (x.is_zero()) throw DomainError("cannot free the reference clock");
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    if (z.is_empty()) return z;
    const std::size_t k = x.index;
    for (std::size_t j = 0; j < z.dimension(); ++j) {
        if (j == k) continue;
        z.set(k, j, Bound::unbounded());
        z.set(j, k, z.at(j, 0));
    }
    return dbm_canonicalize(std::move(z));
}

bool dbm_subset(const Dbm& a, const Dbm& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("zone dimension mismatch");
    if (a.is_empty()) return true;
    if (b.is_empty()) return false;
    return (a.matrix().array() <= b.matrix().array()).all();
}

std::vector<Dbm> dbm_subtract(const Dbm& a, const Dbm& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("zone dimensions differ");
    Dbm rest = a.is_canonical() ? a : dbm_canonicalize(a);
    if (rest.is_empty()) return {};
    if (b.is_empty()) return {rest};
    const Dbm cb = b.is_canonical() ? b : dbm_canonicalize(b);
    std::vector<Dbm> out;
    for (const auto& c : dbm_constraints(cb)) {
        if (rest.at(c.left.index, c.right.index) <= c.bound) continue;
        Dbm piece = dbm_and(rest, negate_constraint(c));
        if (!piece.is_empty()) out.push_back(std::move(piece));
        rest = dbm_and(std::move(rest), c);
        if (rest.is_empty()) break;
    }
    return out;
}

std::vector<ClockConstraint> dbm_constraints(const Dbm& z) {
    const Dbm c = z.is_canonical() ? z : dbm_canonicalize(z);
    std::vector<ClockConstraint> out;
    if (c.is_empty()) {
        out.push_back({ClockId::zero(), ClockId::zero(), Bound::strict(0)});
        return out;
    }
    for (std::size_t i = 0; i < c.dimension(); ++i)
        for (std::size_t j = 0; j < c.dimension(); ++j) {
            if (i == j || c.at(i, j).is_unbounded()) continue;
            if (i == 0 && c.at(i, j) >= Bound::zero()) continue;  // implied x >= 0
            out.push_back({ClockId{i}, ClockId{j}, c.at(i, j)});
        }
    return out;
}

Dbm dbm_extrapolate(Dbm z, const std::vector<std::int32_t>& max_constants) {
    if (max_constants.size() < z.dimension())
        throw DimensionError("max-constant vector shorter than zone dimension");
    if (!z.is_canonical()) z = dbm_canonicalize(std::move(z));
    if (z.is_empty()) return z;
    const std::size_t n = z.dimension();
    auto max_of = [&](std::size_t i) { return i == 0 ? 0 : max_constants[i]; };
    bool changed = false;
    Dbm out = z;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Bound b = z.at(i, j);
            if (b.is_unbounded()) continue;
            if (b > Bound::weak(max_of(i))) {
                out.set(i, j, Bound::unbounded());
                changed = true;
            } else if (b < Bound::strict(-max_of(j))) {
                out.set(i, j, Bound::strict(-max_of(j)));
                changed = true;
            }
        }
    }
    if (!changed) return z;
    return dbm_canonicalize(std::move(out));
}

// ── Concrete valuations ─────────────────────────────────────────────────────

namespace {

bool within(const Rational& diff, Bound b) {
    if (b.is_unbounded()) return true;
    const Rational c(b.value());
    return b.is_strict() ? diff < c : diff <= c;
}

}  // namespace

bool satisfies(const Valuation& v, const ClockConstraint& c) {
    return within(v.at(c.left.index) - v.at(c.right.index), c.bound);
}

bool dbm_contains(const Dbm& z, const Valuation& v) {
    if (v.size() != z.dimension()) throw DimensionError("valuation size mismatch");
    if (z.is_empty()) return false;
    if (v[0] != Rational(0)) return false;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < Rational(0)) return false;
    for (std::size_t i = 0; i < z.dimension(); ++i)
        for (std::size_t j = 0; j < z.dimension(); ++j)
            if (i != j && !within(v[i] - v[j], z.at(i, j))) return false;
    return true;
}

bool DelayInterval::contains(const Rational& d) const {
    if (empty) return false;
    if (lo_strict ? d <= lo : d < lo) return false;
    if (hi && (hi_strict ? d >= *hi : d > *hi)) return false;
    return true;
}

DelayInterval dbm_delay_interval(const Dbm& z, const Valuation& v) {
    DelayInterval r;
    if (z.is_empty() || v.size() != z.dimension()) return r;
    const std::size_t n = z.dimension();
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 1; j < n; ++j)
            if (i != j && !within(v[i] - v[j], z.at(i, j))) return r;

    auto raise_lo = [&](Rational lo, bool strict) {
        if (lo > r.lo || (lo == r.lo && strict)) {
            r.lo = lo;
            r.lo_strict = strict;
        }
    };
    auto lower_hi = [&](Rational hi, bool strict) {
        if (!r.hi || hi < *r.hi || (hi == *r.hi && strict)) {
            r.hi = hi;
            r.hi_strict = strict;
        }
    };
    for (std::size_t i = 1; i < n; ++i) {
        // v_i + d <= c
        const Bound up = z.at(i, 0);
        if (!up.is_unbounded()) lower_hi(Rational(up.value()) - v[i], up.is_strict());
        // -(v_i + d) <= c  <=>  d >= -c - v_i
        const Bound lo = z.at(0, i);
        if (!lo.is_unbounded()) raise_lo(Rational(-lo.value()) - v[i], lo.is_strict());
    }
    r.empty = false;
    if (r.hi) {
        if (*r.hi < r.lo || (*r.hi == r.lo && (r.lo_strict || r.hi_strict))) r.empty = true;
    }
    return r;
}

// ── Rendering ───────────────────────────────────────────────────────────────

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string dbm_to_string(const Dbm& z, const std::vector<std::string>& names) {
    if (z.is_empty()) return "false";
    const std::size_t n = z.dimension();
    auto name = [&](std::size_t i) {
        return i - 1 < names.size() ? names[i - 1] : "x" + std::to_string(i);
    };
    std::vector<std::string> parts;
    for (std::size_t i = 1; i < n; ++i) {
        const Bound lo = z.at(0, i);
        const Bound hi = z.at(i, 0);
        if (hi.is_unbounded() && lo == Bound::zero()) continue;  // only x >= 0
        std::ostringstream os;
        if (!hi.is_unbounded() && hi.is_weak() && lo.is_weak() && -lo.value() == hi.value()) {
            os << name(i) << "==" << hi.value();
        } else {
            os << -lo.value() << (lo.is_strict() ? "<" : "<=") << name(i);
            if (!hi.is_unbounded()) os << (hi.is_strict() ? "<" : "<=") << hi.value();
        }
        parts.push_back(os.str());
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = 1; j < n; ++j) {
            if (i == j) continue;
            const Bound b = z.at(i, j);
            if (b.is_unbounded() || b >= z.at(i, 0) + z.at(0, j)) continue;
            parts.push_back(name(i) + "-" + name(j) + (b.is_strict() ? "<" : "<=") +
                            std::to_string(b.value()));
        }
    }
    if (parts.empty()) return "true";
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += " && ";
        out += parts[k];
    }
    return out;
}

}  // namespace tamc
