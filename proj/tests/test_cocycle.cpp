// Transfer matrices, Lyapunov exponents, sweeps and the vanishing-set proxy.
// Reference values: spectral radii of constant and periodic monodromy
// matrices computed here in closed form.

#include <doctest.h>

#include <cmath>
#include <random>

#include "ergospec/cocycle.hpp"
#include "ergospec/error.hpp"

using namespace ergospec;

namespace {

// log of the spectral radius of a 2x2 matrix with unit determinant, per step.
double log_spectral_radius_per_step(const TransferMatrix& m, int period) {
    const double half_trace = std::abs(m.a + m.d) / 2.0;
    if (half_trace <= 1.0) return 0.0;
    return std::log(half_trace + std::sqrt(half_trace * half_trace - 1.0)) / period;
}

LyapunovSettings steps(std::int64_t n, int renorm = 16, int blocks = 32) {
    LyapunovSettings s;
    s.n_steps = n;
    s.renorm_every = renorm;
    s.block_count = blocks;
    return s;
}

}  // namespace

TEST_CASE("single step matrices") {
    CHECK(single_step(0.0, 0.0) == TransferMatrix{0.0, -1.0, 1.0, 0.0});
    CHECK(single_step(2.0, 0.0) == TransferMatrix{2.0, -1.0, 1.0, 0.0});
    CHECK(single_step(1.0, 1.0) == TransferMatrix{0.0, -1.0, 1.0, 0.0});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 1000; ++i) CHECK(single_step(u(rng), u(rng)).determinant() == 1.0);
    SUBCASE("products stay unimodular up to rounding") {
        TransferMatrix m;
        for (int i = 0; i < 20; ++i) m = single_step(u(rng) / 10.0, u(rng) / 10.0) * m;
        const double scale = std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
        CHECK(std::abs(m.determinant() - 1.0) <= 1e-12 * scale * scale);
    }
}

TEST_CASE("free case matches the constant-matrix spectral radius") {
    const auto zero = SamplingFunction::constant(0.0);
    const Dynamics dyn = Rotation{constants::golden};
    for (double e : {-3.0, -2.5, 2.5, 3.0}) {
        const auto est = lyapunov(e, zero, dyn, TorusPoint{0}, steps(1'000'000));
        CHECK(est.gamma == doctest::Approx(std::acosh(std::abs(e) / 2.0)).epsilon(0).scale(0).epsilon(1e-4));
        CHECK(std::abs(est.gamma - log_spectral_radius_per_step(single_step(e, 0.0), 1)) <= 1e-4);
    }
    for (double e : {-1.9, -1.0, 0.0, 1.0, 1.9}) {
        const auto est = lyapunov(e, zero, dyn, TorusPoint{0}, steps(1'000'000));
        CHECK(est.gamma >= 0.0);
        CHECK(est.gamma <= std::max(3.0 * est.std_error, 1e-3));
    }
}

TEST_CASE("constant and periodic potentials") {
    SUBCASE("V == c shifts the free exponent") {
        const std::vector<double> v(100'000, 0.7);
        for (double e : {-3.0, 3.5, 4.0}) {
            const auto est = lyapunov_from_potential(e, v, steps(100'000));
            CHECK(std::abs(est.gamma - std::acosh(std::abs(e - 0.7) / 2.0)) <= 1e-3);
        }
    }
    SUBCASE("period-2 potential: log spectral radius of the two-step monodromy") {
        std::vector<double> v(200'000);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 == 0) ? 1.5 : -1.5;
        for (double e : {0.0, 0.5, 2.0, 4.0}) {
            const TransferMatrix mono = single_step(e, -1.5) * single_step(e, 1.5);
            const double ref = log_spectral_radius_per_step(mono, 2);
            const auto est = lyapunov_from_potential(e, v, steps(200'000));
            CHECK(std::abs(est.gamma - ref) <= 1e-3);
        }
    }
}

TEST_CASE("estimate is invariant under the renormalization period") {
    const auto f = SamplingFunction::cosine(3.0);
    const Dynamics dyn = Rotation{constants::golden};
    const TorusPoint w = TorusPoint::from_double(0.123);
    for (double e : {-2.0, 0.3, 1.7}) {
        const auto a = lyapunov(e, f, dyn, w, steps(65'536, 1));
        const auto b = lyapunov(e, f, dyn, w, steps(65'536, 16));
        const auto c = lyapunov(e, f, dyn, w, steps(65'536, 256));
        CHECK(std::abs(a.gamma - b.gamma) <= 1e-10);
        CHECK(std::abs(a.gamma - c.gamma) <= 1e-10);
    }
}

TEST_CASE("gamma is the total log-norm over n, blocks average to it") {
    const std::vector<double> v(64'000, 0.0);
    const auto est = lyapunov_from_potential(3.0, v, steps(64'000, 16, 32));
    REQUIRE(est.block_slopes.size() == 32);
    double mean = 0.0;
    for (double s : est.block_slopes) mean += s;
    mean /= 32.0;
    CHECK(est.gamma == doctest::Approx(mean).epsilon(1e-12));
    CHECK(est.std_error >= 0.0);
    CHECK(est.n_steps == 64'000);
}

TEST_CASE("overflow guard retries with renormalization every step") {
    const std::vector<double> v(4096, 0.0);
    const auto est = lyapunov_from_potential(1e10, v, steps(4096, 64, 4));
    CHECK(est.renorm_used == 1);
    CHECK(est.gamma == doctest::Approx(std::log(1e10)).epsilon(1e-9));
    CHECK_THROWS_AS(lyapunov_from_potential(1e300, v, steps(4096, 64, 4)), NumericError);
    CHECK_THROWS_AS(lyapunov_from_potential(std::nan(""), v, steps(4096)), NumericError);
    CHECK_THROWS_AS(lyapunov_from_potential(0.0, v, steps(4096, 16, 512)), DomainError);
}

TEST_CASE("Herman bound holds across a cosine sweep") {
    const double lambda = 3.0;
    const auto f = SamplingFunction::cosine(lambda);
    const Dynamics dyn = Rotation{constants::golden};
    const auto omegas = sample_points(dyn, 2, 31);
    const auto table = lyapunov_sweep(f, dyn, omegas, EnergyGrid{-5.0, 5.0, 41}, steps(100'000), 2);
    for (const auto& row : table.rows) {
        CHECK(row.gamma >= std::log(lambda / 2.0) - 3.0 * row.std_error - 0.01);
    }
}

TEST_CASE("reflected starting point gives the same exponent for even f") {
    const auto f = SamplingFunction::cosine(2.5);
    const Dynamics dyn = Rotation{constants::golden};
    const TorusPoint w = TorusPoint::from_double(0.377);
    for (double e : {-1.0, 0.0, 2.2}) {
        const auto a = lyapunov(e, f, dyn, w, steps(200'000));
        const auto b = lyapunov(e, f, dyn, -w, steps(200'000));
        CHECK(std::abs(a.gamma - b.gamma) <= 3.0 * (a.std_error + b.std_error) + 1e-6);
    }
}

TEST_CASE("standard error shrinks with the run length") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> energy(-3.0, 3.0);
    std::uniform_real_distribution<double> coupling(0.5, 4.0);
    const Dynamics dyn = Rotation{constants::golden};
    for (int trial = 0; trial < 10; ++trial) {
        const auto f = SamplingFunction::cosine(coupling(rng));
        const TorusPoint w{rng()};
        const double e = energy(rng);
        const auto a = lyapunov(e, f, dyn, w, steps(10'000));
        const auto b = lyapunov(e, f, dyn, w, steps(100'000));
        const auto c = lyapunov(e, f, dyn, w, steps(1'000'000));
        CHECK(b.std_error < a.std_error);
        CHECK(c.std_error < b.std_error);
    }
}

TEST_CASE("sweeps") {
    const auto zero = SamplingFunction::constant(0.0);
    const Dynamics dyn = Rotation{constants::golden};
    const std::vector<Point> omegas{TorusPoint{0}};
    const EnergyGrid grid{-3.0, 3.0, 7};
    CHECK(grid.at(0) == -3.0);
    CHECK(grid.at(6) == 3.0);
    CHECK(grid.spacing() == 1.0);

    const auto table = lyapunov_sweep(zero, dyn, omegas, grid, steps(1'000'000), 3);
    REQUIRE(table.rows.size() == 7);
    const double edge = std::acosh(1.5);
    CHECK(std::abs(table.rows[0].gamma - edge) <= 1e-4);
    CHECK(std::abs(table.rows[6].gamma - edge) <= 1e-4);
    for (int i = 1; i < 6; ++i) CHECK(table.rows[static_cast<std::size_t>(i)].gamma <= 1e-3);

    SUBCASE("a one-point grid reproduces lyapunov()") {
        const auto f = SamplingFunction::cosine(4.0);
        const auto single = lyapunov_sweep(f, dyn, omegas, EnergyGrid{0.4, 0.4, 1}, steps(50'000));
        const auto direct = lyapunov(0.4, f, dyn, TorusPoint{0}, steps(50'000));
        CHECK(single.rows.at(0).gamma == direct.gamma);
    }
    SUBCASE("disjoint seeds agree (ergodicity)") {
        const auto f = SamplingFunction::cosine(4.0);
        const auto seeds = sample_points(dyn, 2, 12);
        for (double e : {-2.0, 0.0, 1.0}) {
            const auto a = lyapunov(e, f, dyn, seeds[0], steps(200'000));
            const auto b = lyapunov(e, f, dyn, seeds[1], steps(200'000));
            CHECK(std::abs(a.gamma - b.gamma) <= 3.0 * (a.std_error + b.std_error) + 1e-9);
        }
    }
    SUBCASE("the worker count does not change the table") {
        const auto f = SamplingFunction::cosine(1.5);
        const auto seeds = sample_points(dyn, 3, 4);
        const auto one = lyapunov_sweep(f, dyn, seeds, EnergyGrid{-3.0, 3.0, 13}, steps(20'000), 1);
        const auto four = lyapunov_sweep(f, dyn, seeds, EnergyGrid{-3.0, 3.0, 13}, steps(20'000), 4);
        for (std::size_t i = 0; i < one.rows.size(); ++i) {
            CHECK(one.rows[i].gamma == four.rows[i].gamma);
            CHECK(one.rows[i].std_error == four.rows[i].std_error);
        }
    }
    SUBCASE("numeric failures become flagged rows") {
        const auto bad = lyapunov_sweep(zero, dyn, omegas, EnergyGrid{1e299, 1e300, 2}, steps(4096, 64, 4));
        for (const auto& row : bad.rows) CHECK(row.flagged);
    }
}

TEST_CASE("vanishing-set measure") {
    const auto zero = SamplingFunction::constant(0.0);
    const Dynamics dyn = Rotation{constants::golden};
    const std::vector<Point> omegas{TorusPoint{0}};
    const auto free = lyapunov_sweep(zero, dyn, omegas, EnergyGrid{-3.0, 3.0, 601}, steps(200'000), 2);
    const auto vs = vanishing_set(free, 0.01);
    CHECK(std::abs(vs.measure_estimate - 4.0) <= 0.02);
    CHECK(vs.measure_estimate <= free.grid.length());
    CHECK(vanishing_set(free, 0.0).measure_estimate == 0.0);
    CHECK(vs.measure_half_threshold <= vs.measure_estimate);
    CHECK(vs.measure_estimate <= vs.measure_double_threshold);

    const auto amo = lyapunov_sweep(SamplingFunction::cosine(4.0), dyn, omegas, EnergyGrid{-6.0, 6.0, 121},
                                    steps(100'000), 2);
    CHECK(vanishing_set(amo, 0.1).measure_estimate == 0.0);
}
