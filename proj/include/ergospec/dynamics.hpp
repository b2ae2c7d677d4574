#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ergospec {

// A point of the circle R/Z stored as a 64-bit fixed-point fraction:
// value = raw / 2^64. All arithmetic wraps modulo 2^64, so it is exact.
struct TorusPoint {
    std::uint64_t raw = 0;

    static constexpr TorusPoint from_raw(std::uint64_t r) noexcept { return TorusPoint{r}; }
    // Nearest grid point to x mod 1.
    static TorusPoint from_double(double x);
    // floor(p * 2^64 / q) mod 2^64, i.e. the grid point at or just below p/q.
    static TorusPoint from_ratio(std::int64_t p, std::uint64_t q);

    double to_double() const noexcept;

    constexpr TorusPoint scaled(std::int64_t n) const noexcept {
        return TorusPoint{raw * static_cast<std::uint64_t>(n)};
    }

    friend constexpr TorusPoint operator+(TorusPoint a, TorusPoint b) noexcept { return {a.raw + b.raw}; }
    friend constexpr TorusPoint operator-(TorusPoint a, TorusPoint b) noexcept { return {a.raw - b.raw}; }
    friend constexpr TorusPoint operator-(TorusPoint a) noexcept { return {0 - a.raw}; }
    friend constexpr auto operator<=>(TorusPoint, TorusPoint) = default;
};

// min(|a-b|, 1-|a-b|) on the circle, in raw units (at most 2^63).
constexpr std::uint64_t circle_distance_raw(TorusPoint a, TorusPoint b) noexcept {
    const std::uint64_t d = a.raw - b.raw;
    const std::uint64_t e = b.raw - a.raw;
    return d < e ? d : e;
}
double circle_distance(TorusPoint a, TorusPoint b) noexcept;

namespace constants {
// floor(2^64 * (sqrt(5) - 1) / 2)
inline constexpr TorusPoint golden{0x9E3779B97F4A7C15ULL};
// floor(2^64 * (sqrt(2) - 1))
inline constexpr TorusPoint sqrt2m1{0x6A09E667F3BCC908ULL};
}  // namespace constants

// Point of the two-torus acted on by the skew shift.
struct TorusPair {
    TorusPoint x;
    TorusPoint y;
    friend constexpr auto operator<=>(const TorusPair&, const TorusPair&) = default;
};

// Point of a two-sided symbol space: the sequence selected by `key`, read
// starting at `offset`. The shift moves the offset.
struct SymbolPoint {
    std::uint64_t key = 0;
    std::int64_t offset = 0;
    friend constexpr auto operator<=>(const SymbolPoint&, const SymbolPoint&) = default;
};

using Point = std::variant<TorusPoint, TorusPair, SymbolPoint>;

struct Rotation {
    TorusPoint alpha;
    friend constexpr bool operator==(const Rotation&, const Rotation&) = default;
};

// (x, y) -> (x + alpha, y + x)
struct SkewShift {
    TorusPoint alpha;
    friend constexpr bool operator==(const SkewShift&, const SkewShift&) = default;
};

// Full shift on `alphabet` symbols with i.i.d. uniform letters drawn from a
// counter-based generator keyed by (seed, point key, position).
struct SymbolShift {
    std::uint32_t alphabet = 2;
    std::uint64_t seed = 0;
    friend constexpr bool operator==(const SymbolShift&, const SymbolShift&) = default;
};

using Dynamics = std::variant<Rotation, SkewShift, SymbolShift>;

std::string describe(const Dynamics& dyn);
std::string describe(const Point& p);

// Largest |n| accepted by iterate.
inline constexpr std::int64_t kMaxIterate = std::int64_t{1} << 62;

// T^n(omega), exact. Throws DomainError if the point kind does not match the
// dynamics or |n| > 2^62.
Point iterate(const Dynamics& dyn, const Point& omega, std::int64_t n);

// T^n(omega) for n = n_min..n_max.
std::vector<Point> orbit(const Dynamics& dyn, const Point& omega, std::int64_t n_min, std::int64_t n_max);

// Letter of the symbol sequence at position 0 of p.
std::uint32_t symbol_at(const SymbolShift& dyn, const SymbolPoint& p) noexcept;

// Uniform samples of the invariant measure (Lebesgue on the torus, product
// measure on symbol space), reproducible from the seed.
std::vector<Point> sample_points(const Dynamics& dyn, std::size_t count, std::uint64_t seed);

// Point of the kind this dynamics acts on, built from a torus coordinate.
// Skew-shift points get (0, t); symbol points get key = t.raw.
Point point_for(const Dynamics& dyn, TorusPoint t);

struct Convergent {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    friend constexpr bool operator==(const Convergent&, const Convergent&) = default;
};

struct ContinuedFraction {
    TorusPoint alpha;
    std::vector<std::uint64_t> partial_quotients;  // a_0, a_1, ...
    std::vector<Convergent> convergents;           // p_k / q_k for k = 0, 1, ...
};

// Expansion of the dyadic rational alpha.raw / 2^64 up to a_depth. Stops early
// when the expansion terminates or the next denominator would exceed 2^64 - 1.
ContinuedFraction continued_fraction(TorusPoint alpha, int depth);

struct ReturnTime {
    std::int64_t n = 0;
    std::uint64_t distance_raw = 0;
    double distance = 0.0;
};

inline constexpr std::int64_t kDefaultReturnHorizon = std::int64_t{1} << 30;

// Record close approaches of T^n(omega) to target over n = 1..horizon: each
// entry is strictly closer than every earlier n. Stops after `count` records,
// at distance zero, or at the horizon. Rotation and SkewShift only.
std::vector<ReturnTime> return_times(const Dynamics& dyn, const Point& omega, const Point& target, int count,
                                     std::int64_t horizon = kDefaultReturnHorizon);

}  // namespace ergospec
