#include "ergospec/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergospec/error.hpp"
#include "ergospec/parallel.hpp"

namespace ergospec {

namespace {

// Replaces vanishing pivots in the Sturm recurrence.
constexpr double kPivotFloor = 1e-280;

struct Bisector {
    const JacobiMatrix& j;
    double tol;
    std::vector<double>& out;

    void solve(double lo, double hi, std::size_t c_lo, std::size_t c_hi) {
        while (c_hi > c_lo) {
            if (hi - lo <= tol) {
                const double mid = 0.5 * (lo + hi);
                for (std::size_t k = c_lo; k < c_hi; ++k) out[k] = mid;
                return;
            }
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                for (std::size_t k = c_lo; k < c_hi; ++k) out[k] = mid;
                return;
            }
            const std::size_t c_mid = count_below(j, mid);
            // Recurse into the smaller side, loop on the other.
            if (c_mid - c_lo < c_hi - c_mid) {
                solve(lo, mid, c_lo, c_mid);
                lo = mid;
                c_lo = c_mid;
            } else {
                solve(mid, hi, c_mid, c_hi);
                hi = mid;
                c_hi = c_mid;
            }
        }
    }
};

}  // namespace

std::pair<double, double> gershgorin_bounds(const JacobiMatrix& j) {
    if (j.diagonal.empty()) {
        throw DomainError("Jacobi matrix must have at least one site");
    }
    const auto [lo, hi] = std::minmax_element(j.diagonal.begin(), j.diagonal.end());
    return {*lo - 2.0, *hi + 2.0};
}

std::size_t count_below(const JacobiMatrix& j, double x) {
    std::size_t count = 0;
    double q = 1.0;
    bool first = true;
    for (double d : j.diagonal) {
        q = first ? d - x : d - x - 1.0 / q;
        first = false;
        if (std::abs(q) < kPivotFloor) q = -kPivotFloor;
        if (q < 0.0) ++count;
    }
    return count;
}

std::vector<double> eigenvalues(const JacobiMatrix& j, double tol) {
    auto [lo, hi] = gershgorin_bounds(j);
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw NumericError("eigenvalues: non-finite diagonal");
    }
    const double width = hi - lo;
    if (!(tol >= 4.0 * std::numeric_limits<double>::epsilon() * width)) {
        throw NumericError("eigenvalues: tolerance below 4 * eps * Gershgorin width");
    }
    // Widen so the end counts are exactly 0 and n.
    const double pad = std::max(tol, 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))));
    lo -= pad;
    hi += pad;
    const std::size_t n = j.size();
    if (n == 1) return {j.diagonal[0]};
    std::vector<double> out(n);
    Bisector{j, tol, out}.solve(lo, hi, count_below(j, lo), count_below(j, hi));
    return out;
}

std::size_t EigenPool::total() const noexcept {
    std::size_t t = 0;
    for (const auto& s : samples) t += s.size();
    return t;
}

std::pair<double, double> EigenPool::range() const noexcept {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : samples) {
        if (s.empty()) continue;
        lo = std::min(lo, s.front());
        hi = std::max(hi, s.back());
    }
    return {lo, hi};
}

EigenPool eigen_pool(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas, int n, double tol,
                     std::int64_t first_site, unsigned threads) {
    if (n < 1) {
        throw DomainError("eigen_pool: box size must be positive");
    }
    if (static_cast<unsigned long long>(n) * omegas.size() > static_cast<unsigned long long>(kMaxWindowElements)) {
        throw ResourceError("eigen_pool: box size * sample count exceeds the memory budget");
    }
    EigenPool pool;
    pool.box = n;
    pool.samples.resize(omegas.size());
    parallel_for(omegas.size(), threads, [&](std::size_t s) {
        JacobiMatrix j{std::vector<double>(static_cast<std::size_t>(n))};
        fill_potential(f, dyn, omegas[s], first_site, j.diagonal);
        pool.samples[s] = eigenvalues(j, tol);
    });
    return pool;
}

IDSTable ids_from_pools(const EigenPool& pool, const EigenPool& shifted, const EnergyGrid& grid) {
    if (pool.samples.empty() || pool.samples.size() != shifted.samples.size() || pool.box != shifted.box) {
        throw DomainError("ids: pools must be non-empty and of matching shape");
    }
    IDSTable t;
    t.box = pool.box;
    t.sample_count = static_cast<int>(pool.samples.size());
    const double norm = static_cast<double>(pool.box) * static_cast<double>(pool.samples.size());
    auto k_at = [&](const EigenPool& p, double e) {
        std::size_t c = 0;
        for (const auto& s : p.samples) c += static_cast<std::size_t>(std::upper_bound(s.begin(), s.end(), e) - s.begin());
        return static_cast<double>(c) / norm;
    };
    for (int i = 0; i < grid.count; ++i) {
        const double e = grid.at(i);
        const double k = k_at(pool, e);
        const double ks = k_at(shifted, e);
        t.energies.push_back(e);
        t.k_values.push_back(k);
        t.boundary_sensitivity.push_back(std::abs(k - ks));
        t.max_boundary_sensitivity = std::max(t.max_boundary_sensitivity, std::abs(k - ks));
    }
    return t;
}

IDSTable ids(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas, int n,
             const EnergyGrid& grid, double tol, unsigned threads) {
    if (n < 8) {
        throw DomainError("ids: box size must be at least 8");
    }
    if (omegas.empty()) {
        throw DomainError("ids: at least one sample is required");
    }
    if (grid.count < 1) {
        throw DomainError("ids: empty energy grid");
    }
    const EigenPool pool = eigen_pool(f, dyn, omegas, n, tol, 1, threads);
    const EigenPool shifted = eigen_pool(f, dyn, omegas, n, tol, 2, threads);
    return ids_from_pools(pool, shifted, grid);
}

ThoulessEstimate thouless_gamma(double energy, const EigenPool& pool, double radius) {
    const std::size_t total = pool.total();
    if (total < kMinThoulessPool) {
        throw DomainError("thouless_gamma: needs at least 1000 pooled eigenvalues, got " + std::to_string(total));
    }
    ThoulessEstimate est;
    est.energy = energy;
    if (radius < 0.0) {
        const auto [lo, hi] = pool.range();
        radius = (hi - lo) / static_cast<double>(total) / 10.0;
    }
    est.exclusion_radius = radius;
    double sum = 0.0;
    for (const auto& s : pool.samples) {
        for (double e : s) {
            const double d = std::abs(energy - e);
            if (d < radius || d == 0.0) {
                ++est.excluded;
                continue;
            }
            sum += std::log(d);
            ++est.used;
        }
    }
    est.gamma = est.used ? sum / static_cast<double>(est.used) : std::numeric_limits<double>::quiet_NaN();
    est.ill_conditioned = static_cast<double>(est.excluded) > 0.01 * static_cast<double>(total);
    return est;
}

std::vector<Interval> merge_intervals(std::span<const double> points, double merge_gap) {
    if (!(merge_gap >= 0.0)) {
        throw DomainError("merge_intervals: merge_gap must be non-negative");
    }
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<Interval> out;
    for (double p : sorted) {
        const Interval iv{p - merge_gap, p + merge_gap};
        if (!out.empty() && iv.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

std::vector<Interval> spectrum_from_pool(const EigenPool& pool, double merge_gap) {
    std::vector<double> all;
    all.reserve(pool.total());
    for (const auto& s : pool.samples) all.insert(all.end(), s.begin(), s.end());
    return merge_intervals(all, merge_gap);
}

std::vector<Interval> spectrum_approx(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas,
                                      int n, double merge_gap, double tol, unsigned threads) {
    if (n < 8) {
        throw DomainError("spectrum_approx: box size must be at least 8");
    }
    if (omegas.empty()) {
        throw DomainError("spectrum_approx: at least one sample is required");
    }
    return spectrum_from_pool(eigen_pool(f, dyn, omegas, n, tol, 1, threads), merge_gap);
}

}  // namespace ergospec
