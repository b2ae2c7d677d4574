#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ergospec/dynamics.hpp"
#include "ergospec/sampling.hpp"

namespace ergospec {

// Minimum circle distance (2^-40) between orbit points and discontinuities
// for f to count as continuous there.
inline constexpr std::uint64_t kGuardRadiusRaw = std::uint64_t{1} << 24;

// Two starting points whose potentials agree to within eps on [-m, -1] and
// differ by delta at n = 0. Canonically omega_a < omega_b.
struct WitnessPair {
    Point omega_a;
    Point omega_b;
    int m = 0;
    double eps = 0.0;    // max over [-m, -1] of |V_a(n) - V_b(n)|
    double delta = 0.0;  // |V_a(0) - V_b(0)|
    PotentialWindow left_a;
    PotentialWindow left_b;
    double v0_a = 0.0;
    double v0_b = 0.0;
};

// Recomputes both potentials from (f, dynamics, omega) and checks the stored
// eps/delta values and the inequalities eps <= eps_bound, delta >= delta_bound.
bool verify_witness(const WitnessPair& w, double eps_bound, double delta_bound);

enum class Side { left, right };

struct ApproachSides {
    Side a = Side::left;
    Side b = Side::right;
};

// Splits the orbit at a discontinuity omega0 of f: omega_a and omega_b sit at
// distance h on the requested sides, with h halved from min(guard margin / 2,
// 1/16) until the left windows agree to eps_target and the values at 0
// differ by at least half the jump.
// Throws GuardError if f is continuous at omega0 or T^n omega0 (-m <= n <= -1)
// comes within the guard radius of a discontinuity, ResolutionExhausted if no
// h >= 2^-64 works.
WitnessPair construct_witness(const SamplingFunction& f, const Rotation& rot, TorusPoint omega0, int m,
                              double eps_target = 0.0, ApproachSides sides = {});

struct WitnessSearchResult {
    std::vector<WitnessPair> pairs;  // at most max_pairs, each re-verified
    std::uint64_t pairs_found = 0;   // all qualifying pairs, emitted or not
    std::uint64_t rejected = 0;      // emitted candidates that failed re-verification
    double max_delta = 0.0;          // largest gap at 0 within any bucket
};

inline constexpr std::size_t kDefaultMaxPairs = 1000;

// Buckets the samples by their left windows [-m, -1] quantized to multiples
// of eps (eps = 0: exact equality of the evaluated values) and reports pairs
// in a common bucket whose values at 0 differ by at least delta_min > 0.
// Only pairs sharing a bucket are examined.
WitnessSearchResult witness_search(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> samples,
                                   int m, double eps, double delta_min, std::size_t max_pairs = kDefaultMaxPairs,
                                   unsigned threads = 1);

// Samples drawn with sample_points(dyn, sample_count, seed).
WitnessSearchResult witness_search(const SamplingFunction& f, const Dynamics& dyn, int m, double eps,
                                   double delta_min, std::size_t sample_count, std::uint64_t seed,
                                   std::size_t max_pairs = kDefaultMaxPairs, unsigned threads = 1);

struct DefectProfile {
    std::vector<int> m_values;
    double eps = 0.0;
    std::vector<double> defect;               // largest gap at 0 per m (0 if none)
    std::vector<std::uint64_t> pairs_found;   // pairs with a nonzero gap per m
    std::size_t sample_count = 0;
};

// Determinism defect for each window length, all on the same samples.
DefectProfile defect_profile(const SamplingFunction& f, const Dynamics& dyn, std::span<const int> m_values, double eps,
                             std::span<const Point> samples, unsigned threads = 1);

struct TranslateStep {
    int level = 0;
    std::int64_t horizon = 0;  // n searched over 0..horizon
    std::int64_t n = 0;        // best return of omega toward omega1 within the horizon
    double distance = 0.0;
    std::uint64_t distance_raw = 0;
    int window = 0;
    double discrepancy = 0.0;          // sup over |k| <= window of |V_{T^n omega}(k) - V_{omega1}(k)|
    int growing_window = 0;            // window * level
    double growing_discrepancy = 0.0;  // same sup over |k| <= growing_window
};

struct TranslateOptions {
    int window = 10;
    // Level i searches up to the convergent denominator q_{stride * i}.
    int stride = 4;
};

// Pointwise convergence of the translates V_{T^{n_i} omega} to V_{omega1}
// along continued-fraction return times. Throws GuardError when the orbit of
// omega1 within the largest window comes within the guard radius of a
// discontinuity of f.
std::vector<TranslateStep> translate_convergence(const SamplingFunction& f, const Rotation& rot, TorusPoint omega,
                                                 TorusPoint omega1, int depth, TranslateOptions opts = {});

}  // namespace ergospec
