#ifndef TAMC_DBM_HPP
#define TAMC_DBM_HPP

// Difference bound matrices over clocks x_0 = 0, x_1..x_n.
//
// Entry (i, j) bounds x_i - x_j. Row 0 holds lower bounds (0 - x_j), column 0
// upper bounds (x_i - 0). Operations take and return values; every operation
// except set() leaves the matrix canonical (shortest-path closed) or marked
// empty.

#include "tamc/bound.hpp"
#include "tamc/ta.hpp"

#include <Eigen/Core>
#include <boost/rational.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tamc {

using Rational = boost::rational<std::int64_t>;

// Concrete clock valuation, index 0 is the reference clock (always 0).
using Valuation = std::vector<Rational>;

class Dbm {
public:
    using Matrix = Eigen::Matrix<Bound::raw_type, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    // All non-negative valuations over `dim - 1` clocks.
    explicit Dbm(std::size_t dim = 1);

    std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
    std::size_t clock_count() const { return dimension() - 1; }

    Bound at(std::size_t i, std::size_t j) const { return Bound::from_raw(m_(i, j)); }

    // Raw entry write; clears the canonical flag.
    void set(std::size_t i, std::size_t j, Bound b);

    bool is_empty() const { return empty_; }
    bool is_canonical() const { return canonical_; }
    const Matrix& matrix() const { return m_; }

    // Semantic equality on canonical matrices; all empty zones are equal.
    friend bool operator==(const Dbm& a, const Dbm& b);

    std::size_t hash() const;

private:
    friend Dbm dbm_canonicalize(Dbm z);
    friend Dbm dbm_empty(std::size_t dim);

    Matrix m_;
    bool canonical_ = true;
    bool empty_ = false;
};

// {x_1 = ... = x_n = 0}
Dbm dbm_init_zero(std::size_t clocks);
// all non-negative valuations
Dbm dbm_universe(std::size_t clocks);
Dbm dbm_empty(std::size_t dim);

// Floyd-Warshall closure; marks the zone empty on a negative cycle.
Dbm dbm_canonicalize(Dbm z);

// Future: drop all upper bounds on individual clocks.
Dbm dbm_up(Dbm z);
// Past: drop all lower bounds on individual clocks (down to 0).
Dbm dbm_down(Dbm z);

Dbm dbm_and(Dbm z, const ClockConstraint& c);
Dbm dbm_and(Dbm z, const std::vector<ClockConstraint>& cs);
// Intersection of two zones of equal dimension.
Dbm dbm_and(Dbm a, const Dbm& b);

// x := v with v >= 0.
Dbm dbm_assign(Dbm z, ClockId x, std::int32_t v);
// Remove every constraint on x except x >= 0.
Dbm dbm_free(Dbm z, ClockId x);

bool dbm_subset(const Dbm& a, const Dbm& b);

// a \ b as a list of pairwise disjoint non-empty zones.
std::vector<Dbm> dbm_subtract(const Dbm& a, const Dbm& b);

// Non-trivial constraints of a canonical zone; conjoining them with the
// universe of the same dimension gives the zone back.
std::vector<ClockConstraint> dbm_constraints(const Dbm& z);

// Classic max-constant abstraction. max_constants[0] is ignored.
Dbm dbm_extrapolate(Dbm z, const std::vector<std::int32_t>& max_constants);

bool dbm_contains(const Dbm& z, const Valuation& v);

bool satisfies(const Valuation& v, const ClockConstraint& c);

// Delays d >= 0 such that v + d lies in z.
struct DelayInterval {
    bool empty = true;
    Rational lo{0};
    bool lo_strict = false;
    std::optional<Rational> hi;  // nullopt: unbounded
    bool hi_strict = false;

    bool contains(const Rational& d) const;
};

DelayInterval dbm_delay_interval(const Dbm& z, const Valuation& v);

// Conjunction string ordered by clock index, e.g. "0<=x<=5 && x-y<=2".
// names[i] labels clock i + 1.
std::string dbm_to_string(const Dbm& z, const std::vector<std::string>& names);

std::string to_string(const Rational& r);

}  // namespace tamc

#endif  // TAMC_DBM_HPP
