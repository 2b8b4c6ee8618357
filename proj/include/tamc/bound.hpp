#ifndef TAMC_BOUND_HPP
#define TAMC_BOUND_HPP

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace tamc {

// ── Bound ───────────────────────────────────────────────────────────────────
// An upper bound "< c", "<= c" or "< infinity" on a clock difference.
//
// Internally packed as 2*value + (weak ? 1 : 0) so that ordering and addition
// are plain integer operations. Unbounded uses a dedicated sentinel.

enum class BoundKind : std::uint8_t { Strict, Weak, Unbounded };

class Bound {
public:
    using raw_type = std::int32_t;

    static constexpr raw_type kInfinityRaw = std::numeric_limits<raw_type>::max();
    // Finite values must stay well inside the packed range.
    static constexpr std::int32_t kMaxValue = (1 << 28);

    constexpr Bound() : raw_(kInfinityRaw) {}

    static constexpr Bound strict(std::int32_t v) { return Bound(v * 2); }
    static constexpr Bound weak(std::int32_t v) { return Bound(v * 2 + 1); }
    static constexpr Bound unbounded() { return Bound(kInfinityRaw); }
    static constexpr Bound zero() { return weak(0); }
    static constexpr Bound from_raw(raw_type r) { return Bound(r); }

    constexpr raw_type raw() const { return raw_; }
    constexpr bool is_unbounded() const { return raw_ == kInfinityRaw; }
    constexpr bool is_strict() const { return !is_unbounded() && (raw_ & 1) == 0; }
    constexpr bool is_weak() const { return !is_unbounded() && (raw_ & 1) == 1; }

    constexpr BoundKind kind() const {
        if (is_unbounded()) return BoundKind::Unbounded;
        return is_strict() ? BoundKind::Strict : BoundKind::Weak;
    }

    // Constant part; meaningless when unbounded.
    constexpr std::int32_t value() const { return raw_ >> 1; }

    // Bound addition: Strict absorbs Weak, infinity absorbs everything.
    friend constexpr Bound operator+(Bound a, Bound b) {
        if (a.is_unbounded() || b.is_unbounded()) return unbounded();
        return Bound(((a.raw_ & ~1) + (b.raw_ & ~1)) | (a.raw_ & b.raw_ & 1));
    }

    // The bound whose satisfying set is the complement after swapping sides:
    // (< c) becomes (<= -c), (<= c) becomes (< -c).
    constexpr Bound negated() const {
        return is_strict() ? weak(-value()) : strict(-value());
    }

    friend constexpr auto operator<=>(Bound a, Bound b) = default;
    friend constexpr bool operator==(Bound a, Bound b) = default;

    // "<= 5", "< 3", "< inf"
    std::string to_string() const;

private:
    constexpr explicit Bound(raw_type r) : raw_(r) {}
    raw_type raw_;
};

}  // namespace tamc

#endif  // TAMC_BOUND_HPP
