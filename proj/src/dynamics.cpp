#include "ergospec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ergospec/error.hpp"

namespace ergospec {

namespace {

using u128 = unsigned __int128;

constexpr double kTwoPow64 = 18446744073709551616.0;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t splitmix(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// n(n-1)/2 mod 2^64; n(n-1) is even and fits in 128 bits for |n| <= 2^62.
std::uint64_t triangular(std::int64_t n) noexcept {
    const __int128 t = static_cast<__int128>(n) * (static_cast<__int128>(n) - 1) / 2;
    return static_cast<std::uint64_t>(t);
}

TorusPair skew_iterate(TorusPoint alpha, TorusPair p, std::int64_t n) noexcept {
    const auto un = static_cast<std::uint64_t>(n);
    return TorusPair{
        TorusPoint{p.x.raw + un * alpha.raw},
        TorusPoint{p.y.raw + un * p.x.raw + triangular(n) * alpha.raw},
    };
}

void check_range(std::int64_t n) {
    if (n > kMaxIterate || n < -kMaxIterate) {
        throw DomainError("iterate: |n| exceeds 2^62");
    }
}

[[noreturn]] void mismatch(const Dynamics& dyn, const Point& p) {
    throw DomainError("point " + describe(p) + " does not belong to the phase space of " + describe(dyn));
}

std::string fixed_text(TorusPoint t) {
    std::ostringstream os;
    os.precision(17);
    os << t.raw << " (" << t.to_double() << ")";
    return os.str();
}

}  // namespace

TorusPoint TorusPoint::from_double(double x) {
    if (!std::isfinite(x)) {
        throw DomainError("torus coordinate must be finite");
    }
    double frac = x - std::floor(x);
    const double scaled = std::nearbyint(std::ldexp(frac, 64));
    if (scaled >= kTwoPow64) {
        return TorusPoint{0};
    }
    return TorusPoint{static_cast<std::uint64_t>(scaled)};
}

TorusPoint TorusPoint::from_ratio(std::int64_t p, std::uint64_t q) {
    if (q == 0) {
        throw DomainError("from_ratio: zero denominator");
    }
    // Reduce p mod q into [0, q) first, then floor(r * 2^64 / q) < 2^64.
    __int128 r = static_cast<__int128>(p) % static_cast<__int128>(q);
    if (r < 0) {
        r += q;
    }
    const u128 num = static_cast<u128>(r) << 64;
    return TorusPoint{static_cast<std::uint64_t>(num / q)};
}

double TorusPoint::to_double() const noexcept {
    return std::ldexp(static_cast<double>(raw), -64);
}

double circle_distance(TorusPoint a, TorusPoint b) noexcept {
    return std::ldexp(static_cast<double>(circle_distance_raw(a, b)), -64);
}

std::string describe(const Dynamics& dyn) {
    return std::visit(overloaded{
                          [](const Rotation& r) { return "rotation(alpha=" + fixed_text(r.alpha) + ")"; },
                          [](const SkewShift& s) { return "skewshift(alpha=" + fixed_text(s.alpha) + ")"; },
                          [](const SymbolShift& s) {
                              return "symbols(k=" + std::to_string(s.alphabet) + ", seed=" + std::to_string(s.seed) +
                                     ")";
                          },
                      },
                      dyn);
}

std::string describe(const Point& p) {
    return std::visit(overloaded{
                          [](const TorusPoint& t) { return "torus " + fixed_text(t); },
                          [](const TorusPair& t) { return "pair (" + fixed_text(t.x) + ", " + fixed_text(t.y) + ")"; },
                          [](const SymbolPoint& s) {
                              return "symbol key=" + std::to_string(s.key) + " offset=" + std::to_string(s.offset);
                          },
                      },
                      p);
}

Point iterate(const Dynamics& dyn, const Point& omega, std::int64_t n) {
    check_range(n);
    if (const auto* r = std::get_if<Rotation>(&dyn)) {
        const auto* t = std::get_if<TorusPoint>(&omega);
        if (t == nullptr) mismatch(dyn, omega);
        return *t + r->alpha.scaled(n);
    }
    if (const auto* s = std::get_if<SkewShift>(&dyn)) {
        const auto* t = std::get_if<TorusPair>(&omega);
        if (t == nullptr) mismatch(dyn, omega);
        return skew_iterate(s->alpha, *t, n);
    }
    const auto* sp = std::get_if<SymbolPoint>(&omega);
    if (sp == nullptr) mismatch(dyn, omega);
    return SymbolPoint{sp->key, static_cast<std::int64_t>(static_cast<std::uint64_t>(sp->offset) +
                                                          static_cast<std::uint64_t>(n))};
}

std::vector<Point> orbit(const Dynamics& dyn, const Point& omega, std::int64_t n_min, std::int64_t n_max) {
    if (n_min > n_max) {
        throw DomainError("orbit: n_min > n_max");
    }
    check_range(n_min);
    check_range(n_max);
    const auto len = static_cast<unsigned long long>(n_max - n_min) + 1;
    if (len > static_cast<unsigned long long>(kMaxWindowElements)) {
        throw ResourceError("orbit: range of " + std::to_string(len) + " points exceeds the memory budget");
    }
    std::vector<Point> out;
    out.reserve(len);
    for (std::int64_t n = n_min;; ++n) {
        out.push_back(iterate(dyn, omega, n));
        if (n == n_max) break;
    }
    return out;
}

std::uint32_t symbol_at(const SymbolShift& dyn, const SymbolPoint& p) noexcept {
    const std::uint64_t h = splitmix(splitmix(dyn.seed ^ splitmix(p.key)) ^ static_cast<std::uint64_t>(p.offset));
    return static_cast<std::uint32_t>((static_cast<u128>(h) * dyn.alphabet) >> 64);
}

std::vector<Point> sample_points(const Dynamics& dyn, std::size_t count, std::uint64_t seed) {
    if (count > static_cast<std::size_t>(kMaxWindowElements)) {
        throw ResourceError("sample_points: sample count exceeds the memory budget");
    }
    std::mt19937_64 gen(seed);
    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (std::holds_alternative<SkewShift>(dyn)) {
            const std::uint64_t x = gen();
            const std::uint64_t y = gen();
            out.emplace_back(TorusPair{TorusPoint{x}, TorusPoint{y}});
        } else if (std::holds_alternative<Rotation>(dyn)) {
            out.emplace_back(TorusPoint{gen()});
        } else {
            out.emplace_back(SymbolPoint{gen(), 0});
        }
    }
    return out;
}

Point point_for(const Dynamics& dyn, TorusPoint t) {
    if (std::holds_alternative<Rotation>(dyn)) return t;
    if (std::holds_alternative<SkewShift>(dyn)) return TorusPair{TorusPoint{0}, t};
    return SymbolPoint{t.raw, 0};
}

ContinuedFraction continued_fraction(TorusPoint alpha, int depth) {
    if (depth < 1) {
        throw DomainError("continued_fraction: depth must be >= 1");
    }
    if (alpha.raw == 0) {
        throw DomainError("continued_fraction: alpha = 0 has no expansion");
    }
    ContinuedFraction cf;
    cf.alpha = alpha;

    u128 num = alpha.raw;
    u128 den = static_cast<u128>(1) << 64;
    // p_{k-2}, p_{k-1}, q_{k-2}, q_{k-1}
    u128 p2 = 0, p1 = 1, q2 = 1, q1 = 0;
    constexpr u128 kLimit = ~std::uint64_t{0};
    for (int k = 0; k <= depth; ++k) {
        const u128 a = num / den;
        const u128 p = a * p1 + p2;
        const u128 q = a * q1 + q2;
        if (q > kLimit || p > kLimit) {
            break;
        }
        cf.partial_quotients.push_back(static_cast<std::uint64_t>(a));
        cf.convergents.push_back({static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(q)});
        p2 = p1;
        p1 = p;
        q2 = q1;
        q1 = q;
        const u128 rem = num - a * den;
        if (rem == 0) {
            break;
        }
        num = den;
        den = rem;
    }
    return cf;
}

std::vector<ReturnTime> return_times(const Dynamics& dyn, const Point& omega, const Point& target, int count,
                                     std::int64_t horizon) {
    if (count < 1) {
        throw DomainError("return_times: count must be >= 1");
    }
    if (std::holds_alternative<SymbolShift>(dyn)) {
        throw UnsupportedDynamics("return_times: symbol shifts have no metric return structure");
    }
    if (horizon < 1 || horizon > kMaxIterate) {
        throw DomainError("return_times: horizon out of range");
    }
    std::vector<ReturnTime> out;
    std::uint64_t best = ~std::uint64_t{0};

    auto record = [&](std::int64_t n, std::uint64_t d) {
        if (d < best) {
            best = d;
            out.push_back({n, d, std::ldexp(static_cast<double>(d), -64)});
        }
        return static_cast<int>(out.size()) >= count || best == 0;
    };

    if (const auto* r = std::get_if<Rotation>(&dyn)) {
        const auto* w = std::get_if<TorusPoint>(&omega);
        const auto* t = std::get_if<TorusPoint>(&target);
        if (w == nullptr) mismatch(dyn, omega);
        if (t == nullptr) mismatch(dyn, target);
        TorusPoint x = *w;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            x = x + r->alpha;
            const std::uint64_t d = circle_distance_raw(x, *t);
            if (d < best && record(n, d)) break;
        }
        return out;
    }

    const auto& s = std::get<SkewShift>(dyn);
    const auto* w = std::get_if<TorusPair>(&omega);
    const auto* t = std::get_if<TorusPair>(&target);
    if (w == nullptr) mismatch(dyn, omega);
    if (t == nullptr) mismatch(dyn, target);
    TorusPair p = *w;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        p = TorusPair{p.x + s.alpha, p.y + p.x};
        const std::uint64_t d = std::max(circle_distance_raw(p.x, t->x), circle_distance_raw(p.y, t->y));
        if (d < best && record(n, d)) break;
    }
    return out;
}

}  // namespace ergospec
