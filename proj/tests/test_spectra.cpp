// Finite-box eigenvalues, IDS, Thouless averages and spectrum approximation.
// The small-matrix oracle finds the roots of the characteristic polynomial
// directly (Durand-Kerner iteration in extended precision), sharing nothing
// with the Sturm-count bisection under test.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <random>

#include "ergospec/cocycle.hpp"
#include "ergospec/error.hpp"
#include "ergospec/spectra.hpp"

using namespace ergospec;

namespace {

// Monic coefficients (highest degree first) of det(x I - J) via the
// three-term recurrence p_k = (x - d_k) p_{k-1} - p_{k-2}.
std::vector<long double> char_poly(const std::vector<double>& d) {
    std::vector<long double> prev{1.0L};             // p_{-1} = 1 (degree 0)
    std::vector<long double> cur{1.0L, -static_cast<long double>(d[0])};  // p_0 = x - d_0
    for (std::size_t k = 1; k < d.size(); ++k) {
        std::vector<long double> next(cur.size() + 1, 0.0L);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[i] += cur[i];
            next[i + 1] -= static_cast<long double>(d[k]) * cur[i];
        }
        const std::size_t shift = next.size() - prev.size();
        for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] -= prev[i];
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

std::complex<long double> horner(const std::vector<long double>& c, std::complex<long double> z) {
    std::complex<long double> acc = 0.0L;
    for (long double a : c) acc = acc * z + a;
    return acc;
}

std::vector<double> polynomial_roots(const std::vector<double>& diagonal) {
    const auto c = char_poly(diagonal);
    const std::size_t n = c.size() - 1;
    std::vector<std::complex<long double>> z(n);
    const std::complex<long double> seed(0.4L, 0.9L);
    for (std::size_t i = 0; i < n; ++i) z[i] = 3.0L * std::pow(seed, static_cast<long double>(i));
    for (int iter = 0; iter < 2000; ++iter) {
        long double moved = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            std::complex<long double> denom = 1.0L;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) denom *= z[i] - z[j];
            }
            const auto step = horner(c, z[i]) / denom;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-18L) break;
    }
    std::vector<double> roots;
    for (const auto& r : z) roots.push_back(static_cast<double>(r.real()));
    std::sort(roots.begin(), roots.end());
    return roots;
}

JacobiMatrix random_jacobi(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    JacobiMatrix j;
    j.diagonal.resize(n);
    for (double& d : j.diagonal) d = u(rng);
    return j;
}

double free_ids(double e) { return std::acos(std::clamp(-e / 2.0, -1.0, 1.0)) / std::numbers::pi; }

}  // namespace

TEST_CASE("closed-form eigenvalues") {
    const auto three = eigenvalues(JacobiMatrix{{0.0, 0.0, 0.0}}, 1e-13);
    REQUIRE(three.size() == 3);
    CHECK(three[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(three[1]) <= 1e-12);
    CHECK(three[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(eigenvalues(JacobiMatrix{{5.0}}, 1e-12) == std::vector<double>{5.0});

    const int n = 1000;
    const auto ev = eigenvalues(JacobiMatrix{std::vector<double>(n, 0.0)}, 1e-12);
    REQUIRE(ev.size() == static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double ref = 2.0 * std::cos((n + 1 - k) * std::numbers::pi / (n + 1));
        CHECK(std::abs(ev[static_cast<std::size_t>(k - 1)] - ref) <= 1e-10);
    }
}

TEST_CASE("bisection agrees with characteristic-polynomial roots on small matrices") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 8;
        const auto j = random_jacobi(rng, n);
        const auto ev = eigenvalues(j, 1e-12);
        const auto ref = polynomial_roots(j.diagonal);
        REQUIRE(ev.size() == n);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(ev[i] - ref[i]) <= 1e-8);
    }
}

TEST_CASE("strict interlacing with the leading subbox") {
    std::mt19937_64 rng(202);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 7;
        const auto j = random_jacobi(rng, n);
        JacobiMatrix minor{std::vector<double>(j.diagonal.begin(), j.diagonal.end() - 1)};
        const auto la = eigenvalues(j, 1e-13);
        const auto lb = eigenvalues(minor, 1e-13);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            CHECK(la[k] < lb[k]);
            CHECK(lb[k] < la[k + 1]);
        }
    }
}

TEST_CASE("trace identities, Gershgorin containment and Sturm counts") {
    std::mt19937_64 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        const auto j = random_jacobi(rng, n);
        const auto ev = eigenvalues(j, 1e-12);
        const double sum_ev = std::accumulate(ev.begin(), ev.end(), 0.0);
        const double sum_d = std::accumulate(j.diagonal.begin(), j.diagonal.end(), 0.0);
        CHECK(std::abs(sum_ev - sum_d) <= 1e-9 * static_cast<double>(n));
        const auto [lo, hi] = gershgorin_bounds(j);
        CHECK(lo <= ev.front());
        CHECK(ev.back() <= hi);
        CHECK(std::is_sorted(ev.begin(), ev.end()));
        CHECK(count_below(j, lo) == 0);
        CHECK(count_below(j, hi + 1e-9) == n);
        // The count strictly below a point between consecutive eigenvalues is its rank.
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (ev[k + 1] - ev[k] > 1e-9) CHECK(count_below(j, 0.5 * (ev[k] + ev[k + 1])) == k + 1);
        }
    }
}

TEST_CASE("degenerate spectra keep multiplicity") {
    // Two decoupled copies cannot be built with unit off-diagonals, but a huge
    // diagonal barrier makes the two halves nearly identical.
    JacobiMatrix j{{0.0, 0.0, 1e6, 0.0, 0.0}};
    const auto ev = eigenvalues(j, 1e-9);
    REQUIRE(ev.size() == 5);
    CHECK(ev[0] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(ev[1] == doctest::Approx(-1.0).epsilon(1e-5));
    CHECK(ev[2] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(ev[3] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(eigenvalues(JacobiMatrix{}, 1e-10), DomainError);
    CHECK_THROWS_AS(eigenvalues(JacobiMatrix{{0.0, 1.0}}, 1e-17), NumericError);
    CHECK_THROWS_AS(eigenvalues(JacobiMatrix{{0.0, std::nan("")}}, 1e-10), NumericError);
}

TEST_CASE("free IDS follows arccos") {
    const auto zero = SamplingFunction::constant(0.0);
    const Dynamics dyn = Rotation{constants::golden};
    const std::vector<Point> omegas{TorusPoint{0}};
    const int n = 400;
    const EnergyGrid grid{-2.5, 2.5, 101};
    const auto table = ids(zero, dyn, omegas, n, grid, 1e-12, 2);
    REQUIRE(table.k_values.size() == 101);
    for (std::size_t i = 0; i < table.energies.size(); ++i) {
        CHECK(std::abs(table.k_values[i] - free_ids(table.energies[i])) <= 2.0 / n);
        CHECK(table.k_values[i] >= 0.0);
        CHECK(table.k_values[i] <= 1.0);
        if (i) CHECK(table.k_values[i] >= table.k_values[i - 1]);
    }
    CHECK(table.k_values.front() == 0.0);
    CHECK(table.k_values.back() == 1.0);
    CHECK(table.max_boundary_sensitivity <= 2.0 / n);
}

TEST_CASE("IDS of an ergodic potential is monotone and saturates outside Gershgorin") {
    const auto f = SamplingFunction::step({TorusPoint{0}, TorusPoint::from_ratio(1, 2)}, {1.0, 0.0});
    const Dynamics dyn = Rotation{constants::golden};
    const auto omegas = sample_points(dyn, 4, 9);
    const auto table = ids(f, dyn, omegas, 64, EnergyGrid{-2.5, 3.5, 61}, 1e-12, 1);
    CHECK(table.k_values.front() == 0.0);
    CHECK(table.k_values.back() == 1.0);
    CHECK(std::is_sorted(table.k_values.begin(), table.k_values.end()));
    CHECK(table.sample_count == 4);
    CHECK(table.box == 64);
    CHECK_THROWS_AS(ids(f, dyn, omegas, 7, EnergyGrid{-1.0, 1.0, 3}, 1e-10), DomainError);
}

TEST_CASE("Thouless averages") {
    const Dynamics dyn = Rotation{constants::golden};
    SUBCASE("free case above the band") {
        const auto pool = eigen_pool(SamplingFunction::constant(0.0), dyn, std::vector<Point>{TorusPoint{0}}, 2000,
                                     1e-12);
        CHECK(std::abs(thouless_gamma(3.0, pool).gamma - std::acosh(1.5)) <= 0.02);
    }
    SUBCASE("far outside the spectrum the average is log E") {
        const auto f = SamplingFunction::cosine(3.0);
        const auto pool = eigen_pool(f, dyn, sample_points(dyn, 4, 1), 300, 1e-10);
        const auto t = thouless_gamma(100.0, pool);
        CHECK(std::abs(t.gamma - std::log(100.0)) <= 0.01 * std::log(100.0));
        CHECK(t.excluded == 0);
        CHECK_FALSE(t.ill_conditioned);
    }
    SUBCASE("agreement with the cocycle on the free band and the cos(4) spectrum") {
        LyapunovSettings settings;
        settings.n_steps = 200'000;
        const auto zero = SamplingFunction::constant(0.0);
        const std::vector<Point> origin{TorusPoint{0}};
        const auto free_pool = eigen_pool(zero, dyn, origin, 2000, 1e-12);
        const EnergyGrid band{-1.96, 1.96, 50};
        for (int i = 0; i < band.count; ++i) {
            const double e = band.at(i);
            const auto t = thouless_gamma(e, free_pool);
            if (t.ill_conditioned) continue;
            const auto g = lyapunov(e, zero, dyn, TorusPoint{0}, settings);
            CHECK(std::abs(t.gamma - g.gamma) < 0.02);
        }
        const auto amo = SamplingFunction::cosine(4.0);
        const auto amo_pool = eigen_pool(amo, dyn, sample_points(dyn, 4, 2), 1000, 1e-12);
        auto all = std::vector<double>();
        for (const auto& s : eigen_pool(amo, dyn, sample_points(dyn, 1, 3), 1000, 1e-12).samples) all = s;
        for (int k = 0; k < 50; ++k) {
            const double e = all[static_cast<std::size_t>(k * 20 + 10)];
            const auto t = thouless_gamma(e, amo_pool);
            if (t.ill_conditioned) continue;
            const auto g = lyapunov(e, amo, dyn, TorusPoint{0}, settings);
            CHECK(std::abs(t.gamma - g.gamma) < 0.02);
        }
    }
    SUBCASE("small pools are refused, exclusions are counted") {
        const auto pool = eigen_pool(SamplingFunction::constant(0.0), dyn, std::vector<Point>{TorusPoint{0}}, 100,
                                     1e-12);
        CHECK_THROWS_AS(thouless_gamma(0.0, pool), DomainError);
        const auto big = eigen_pool(SamplingFunction::constant(0.0), dyn, std::vector<Point>{TorusPoint{0}}, 1000,
                                    1e-12);
        const double e = big.samples[0][500];
        const auto t = thouless_gamma(e, big);
        CHECK(t.excluded >= 1);
        CHECK(t.used + t.excluded == 1000);
        const auto wide = thouless_gamma(e, big, 0.5);
        CHECK(wide.ill_conditioned);
    }
}

TEST_CASE("spectrum approximation") {
    const Dynamics dyn = Rotation{constants::golden};
    SUBCASE("free and constant potentials give one band") {
        const auto one = sample_points(dyn, 1, 5);
        const auto free = spectrum_approx(SamplingFunction::constant(0.0), dyn, one, 500, 0.02, 1e-12);
        REQUIRE(free.size() == 1);
        CHECK(std::abs(free[0].lo + 2.0) <= 0.02 + 1e-4);
        CHECK(std::abs(free[0].hi - 2.0) <= 0.02 + 1e-4);
        const auto shifted = spectrum_approx(SamplingFunction::constant(1.5), dyn, one, 500, 0.02, 1e-12);
        REQUIRE(shifted.size() == 1);
        CHECK(std::abs(shifted[0].lo + 0.5) <= 0.02 + 1e-4);
        CHECK(std::abs(shifted[0].hi - 3.5) <= 0.02 + 1e-4);
    }
    SUBCASE("a strong step stays inside the Gershgorin envelope and has gaps") {
        const auto f = SamplingFunction::step({TorusPoint{0}, TorusPoint::from_ratio(1, 2)}, {6.0, 0.0});
        const auto iv = spectrum_approx(f, dyn, sample_points(dyn, 4, 6), 200, 1e-3, 1e-12, 2);
        REQUIRE(iv.size() > 1);
        CHECK(iv.front().lo >= -2.0 - 1e-3);
        CHECK(iv.back().hi <= 8.0 + 1e-3);
        for (std::size_t i = 1; i < iv.size(); ++i) CHECK(iv[i - 1].hi < iv[i].lo);
    }
    SUBCASE("merging") {
        const std::vector<double> pts{0.0, 0.1, 0.5, 0.55, 2.0};
        const auto iv = merge_intervals(pts, 0.05);
        REQUIRE(iv.size() == 3);
        CHECK(iv[0] == Interval{-0.05, 0.15000000000000002});
        CHECK(iv[1].lo == doctest::Approx(0.45));
        CHECK(iv[1].hi == doctest::Approx(0.6));
        CHECK(iv[2].lo == doctest::Approx(1.95));
        CHECK_THROWS_AS(merge_intervals(pts, -1.0), DomainError);
    }
}

TEST_CASE("eigen pools do not depend on the worker count") {
    const Dynamics dyn = Rotation{constants::golden};
    const auto f = SamplingFunction::cosine(2.0);
    const auto omegas = sample_points(dyn, 6, 8);
    const auto a = eigen_pool(f, dyn, omegas, 150, 1e-12, 1, 1);
    const auto b = eigen_pool(f, dyn, omegas, 150, 1e-12, 1, 4);
    CHECK(a.samples == b.samples);
    CHECK(a.total() == 900);
}
