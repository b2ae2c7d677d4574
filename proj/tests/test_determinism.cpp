// Non-determinism witnesses, determinism defect and translate convergence.
// The search is checked against an all-pairs scan over the same samples.

#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "ergospec/determinism.hpp"
#include "ergospec/error.hpp"

using namespace ergospec;

namespace {

const TorusPoint kHalf = TorusPoint::from_ratio(1, 2);

SamplingFunction half_step() { return SamplingFunction::step({TorusPoint{0}, kHalf}, {1.0, 0.0}); }

std::vector<Point> uniform_grid(std::size_t count) {
    std::vector<Point> pts;
    for (std::size_t k = 0; k < count; ++k) pts.emplace_back(TorusPoint::from_ratio(static_cast<std::int64_t>(k), count));
    return pts;
}

struct BruteForce {
    std::set<std::pair<Point, Point>> pairs;
    std::uint64_t count = 0;
    double max_delta = 0.0;
};

// Every pair of samples whose left windows agree exactly and whose values at
// 0 differ by at least delta_min.
BruteForce all_pairs(const SamplingFunction& f, const Dynamics& dyn, const std::vector<Point>& samples, int m,
                     double delta_min, bool keep_pairs) {
    std::vector<std::vector<double>> left(samples.size());
    std::vector<double> v0(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (int n = -m; n <= -1; ++n) left[i].push_back(evaluate(f, dyn, iterate(dyn, samples[i], n)));
        v0[i] = evaluate(f, dyn, samples[i]);
    }
    BruteForce out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            if (left[i] != left[j]) continue;
            const double d = std::abs(v0[i] - v0[j]);
            out.max_delta = std::max(out.max_delta, d);
            if (d < delta_min) continue;
            ++out.count;
            if (keep_pairs) {
                out.pairs.insert(samples[i] < samples[j] ? std::pair{samples[i], samples[j]}
                                                         : std::pair{samples[j], samples[i]});
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("constructed witnesses for the half step") {
    const Rotation rot{constants::golden};
    const auto f = half_step();
    for (int m : {5, 10, 20, 40}) {
        const auto w = construct_witness(f, rot, kHalf, m, 0.0);
        CHECK(w.eps == 0.0);
        CHECK(w.delta == 1.0);
        CHECK(verify_witness(w, 0.0, 1.0));
        CHECK(std::get<TorusPoint>(w.omega_a) < std::get<TorusPoint>(w.omega_b));
        // Both orbits stay on the same side of every breakpoint over [-m, -1].
        const auto a = std::get<TorusPoint>(w.omega_a);
        const auto b = std::get<TorusPoint>(w.omega_b);
        for (int n = -m; n <= -1; ++n) {
            CHECK(f(a + rot.alpha.scaled(n)) == f(b + rot.alpha.scaled(n)));
        }
        CHECK(f(a) != f(b));
    }
    SUBCASE("approach sides") {
        const auto w = construct_witness(f, rot, kHalf, 10, 0.0, {Side::right, Side::left});
        CHECK(verify_witness(w, 0.0, 1.0));
        CHECK_THROWS_AS(construct_witness(f, rot, kHalf, 10, 0.0, {Side::left, Side::left}), DomainError);
    }
}

TEST_CASE("piecewise cosine witnesses reach half the jump") {
    const Rotation rot{constants::golden};
    const auto f = SamplingFunction::piecewise_cosine({TorusPoint{0}, TorusPoint::from_ratio(1, 3)},
                                                      {{1.0, 0.0}, {2.5, 0.1}});
    const auto jump = one_sided_limits(f, TorusPoint::from_ratio(1, 3)).jump;
    REQUIRE(jump > 0.0);
    const auto w = construct_witness(f, rot, TorusPoint::from_ratio(1, 3), 10, 1e-6);
    CHECK(w.eps <= 1e-6);
    CHECK(w.delta >= jump / 2);
    CHECK(verify_witness(w, 1e-6, jump / 2));
}

TEST_CASE("construction refuses continuous points and guarded orbits") {
    const Rotation rot{constants::golden};
    CHECK_THROWS_AS(construct_witness(SamplingFunction::cosine(2.0), rot, kHalf, 10), GuardError);
    CHECK_THROWS_AS(construct_witness(half_step(), rot, TorusPoint::from_ratio(1, 4), 10), GuardError);
    // Rotation by 1/2: T^-1 of the breakpoint 1/2 is the breakpoint 0.
    CHECK_THROWS_AS(construct_witness(half_step(), Rotation{kHalf}, kHalf, 3), GuardError);
}

TEST_CASE("verification catches tampered pairs") {
    const Rotation rot{constants::golden};
    auto w = construct_witness(half_step(), rot, kHalf, 10);
    REQUIRE(verify_witness(w, 0.0, 1.0));
    CHECK_FALSE(verify_witness(w, 0.0, 1.5));
    auto swapped = w;
    std::swap(swapped.omega_a, swapped.omega_b);
    CHECK_FALSE(verify_witness(swapped, 0.0, 1.0));
    w.left_a.values[3] += 0.25;
    CHECK_FALSE(verify_witness(w, 0.0, 1.0));
}

TEST_CASE("search finds every exact-match pair of the all-pairs scan") {
    const Dynamics dyn = Rotation{constants::golden};
    const auto f = half_step();
    SUBCASE("pairs are a superset on a small grid") {
        const auto grid = uniform_grid(1500);
        const auto brute = all_pairs(f, dyn, grid, 10, 0.9, true);
        REQUIRE(brute.count > 0);
        const auto found = witness_search(f, dyn, grid, 10, 0.0, 0.9, 10'000'000, 2);
        CHECK(found.pairs_found == brute.count);
        CHECK(found.rejected == 0);
        std::set<std::pair<Point, Point>> got;
        for (const auto& w : found.pairs) {
            CHECK(w.omega_a < w.omega_b);
            got.insert({w.omega_a, w.omega_b});
        }
        for (const auto& p : brute.pairs) CHECK(got.count(p) == 1);
    }
    SUBCASE("counts agree on a 10^4-point grid") {
        const auto grid = uniform_grid(10'000);
        const auto brute = all_pairs(f, dyn, grid, 10, 0.9, false);
        const auto found = witness_search(f, dyn, grid, 10, 0.0, 0.9, 100, 2);
        CHECK(found.pairs_found == brute.count);
        CHECK(found.pairs.size() == std::min<std::uint64_t>(100, brute.count));
        CHECK(found.max_delta == brute.max_delta);
        for (const auto& w : found.pairs) CHECK(verify_witness(w, 0.0, 0.9));
    }
}

TEST_CASE("search edge cases") {
    const Dynamics dyn = Rotation{constants::golden};
    const auto f = half_step();
    const std::vector<Point> same{TorusPoint{12345}, TorusPoint{12345}};
    CHECK(witness_search(f, dyn, same, 10, 0.0, 0.5).pairs.empty());
    CHECK_THROWS_AS(witness_search(f, dyn, same, 10, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(witness_search(f, dyn, same, 0, 0.0, 0.5), DomainError);
    const auto seeded = witness_search(f, dyn, 10, 0.0, 0.9, 20'000, 7);
    CHECK_FALSE(seeded.pairs.empty());
    const auto again = witness_search(f, dyn, 10, 0.0, 0.9, 20'000, 7, kDefaultMaxPairs, 3);
    CHECK(seeded.pairs_found == again.pairs_found);
    REQUIRE(seeded.pairs.size() == again.pairs.size());
    for (std::size_t i = 0; i < seeded.pairs.size(); ++i) CHECK(seeded.pairs[i].omega_a == again.pairs[i].omega_a);
}

TEST_CASE("continuous sampling gives no witnesses") {
    const Dynamics dyn = Rotation{constants::golden};
    for (double lambda : {1.0, 2.0, 4.0}) {
        const auto f = SamplingFunction::cosine(lambda);
        const auto r = witness_search(f, dyn, 10, 1e-6, 0.5, 100'000, 3);
        CHECK(r.pairs_found == 0);
        CHECK(r.pairs.empty());
    }
    SUBCASE("defect bounded by the continuity modulus") {
        const double lambda = 2.0;
        const auto f = SamplingFunction::cosine(lambda);
        const auto samples = sample_points(dyn, 50'000, 4);
        for (double eps : {1e-6, 1e-5, 1e-4}) {
            const std::vector<int> ms{5, 10, 20};
            const auto prof = defect_profile(f, dyn, ms, eps, samples);
            for (double d : prof.defect) CHECK(d <= 10.0 * 2.0 * std::numbers::pi * lambda * eps);
        }
    }
}

TEST_CASE("defect profile properties") {
    const Dynamics dyn = Rotation{constants::golden};
    const auto f = half_step();
    const auto samples = sample_points(dyn, 20'000, 5);
    const std::vector<int> ms{1, 2, 5, 10, 20, 40};
    const auto prof = defect_profile(f, dyn, ms, 0.0, samples, 2);
    REQUIRE(prof.defect.size() == ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) CHECK(prof.defect[i] == 1.0);  // the jump, at every m
    for (std::size_t i = 1; i < ms.size(); ++i) {
        CHECK(prof.defect[i] <= prof.defect[i - 1]);
        CHECK(prof.pairs_found[i] <= prof.pairs_found[i - 1]);
    }
    SUBCASE("monotone in eps over nested quantization grids") {
        const auto g = SamplingFunction::cosine(2.0);
        const auto pts = sample_points(dyn, 20'000, 6);
        const std::vector<int> one{5};
        double prev = 0.0;
        for (double eps : {1e-5, 2e-5, 4e-5, 8e-5, 1.6e-4}) {
            const double d = defect_profile(g, dyn, one, eps, pts).defect[0];
            CHECK(d >= prev);
            prev = d;
        }
    }
    SUBCASE("an injective step loses its defect once the windows separate the samples") {
        const auto g = SamplingFunction::step(
            {TorusPoint{0}, TorusPoint::from_ratio(1, 3), TorusPoint::from_ratio(2, 3)}, {0.0, 1.0, 2.0});
        const auto few = sample_points(dyn, 50, 8);
        const std::vector<int> long_windows{200, 400};
        const auto p = defect_profile(g, dyn, long_windows, 0.0, few);
        CHECK(p.defect.back() == 0.0);
    }
    CHECK_THROWS_AS(defect_profile(f, dyn, std::vector<int>{}, 0.0, samples), DomainError);
    CHECK_THROWS_AS(defect_profile(f, dyn, std::vector<int>{10, 5}, 0.0, samples), DomainError);
}

TEST_CASE("translates converge to the target potential") {
    const Rotation rot{constants::golden};
    const TorusPoint omega = TorusPoint::from_double(0.1234);
    const TorusPoint omega1 = TorusPoint::from_double(0.7771);
    SUBCASE("cosine: Lipschitz bound and monotone decrease") {
        const double lambda = 2.0;
        const auto steps = translate_convergence(SamplingFunction::cosine(lambda), rot, omega, omega1, 8);
        REQUIRE(steps.size() == 8);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            CHECK(steps[i].discrepancy <= lambda * 2.0 * std::numbers::pi * steps[i].distance + 1e-12);
            const TorusPoint moved = omega + rot.alpha.scaled(steps[i].n);
            CHECK(steps[i].distance_raw == circle_distance_raw(moved, omega1));
            if (i) CHECK(steps[i].discrepancy <= steps[i - 1].discrepancy);
            CHECK(steps[i].growing_window == steps[i].window * steps[i].level);
        }
        CHECK(steps.back().discrepancy < 1e-3);
    }
    SUBCASE("omega equal to the target") {
        const auto steps = translate_convergence(SamplingFunction::cosine(2.0), rot, omega1, omega1, 3);
        CHECK(steps.front().n == 0);
        CHECK(steps.front().discrepancy == 0.0);
    }
    SUBCASE("step: exact agreement once the orbit is closer than the margin") {
        const auto steps = translate_convergence(half_step(), rot, omega, omega1, 8);
        bool reached = false;
        for (const auto& s : steps) {
            if (s.discrepancy == 0.0) reached = true;
            if (reached) CHECK(s.discrepancy == 0.0);
        }
        CHECK(reached);
    }
    CHECK_THROWS_AS(translate_convergence(half_step(), rot, omega, kHalf, 4), GuardError);
    CHECK_THROWS_AS(translate_convergence(half_step(), rot, omega, kHalf + rot.alpha.scaled(3), 4), GuardError);
}
