#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "ergospec/cocycle.hpp"
#include "ergospec/dynamics.hpp"
#include "ergospec/sampling.hpp"

namespace ergospec {

// Dirichlet restriction of H = Delta + V to n sites: symmetric tridiagonal
// with the potential on the diagonal and 1 on both off-diagonals.
struct JacobiMatrix {
    std::vector<double> diagonal;

    std::size_t size() const noexcept { return diagonal.size(); }
};

// [min V - 2, max V + 2]; contains every eigenvalue.
std::pair<double, double> gershgorin_bounds(const JacobiMatrix& j);

// Number of eigenvalues strictly below x (Sturm sequence sign count).
std::size_t count_below(const JacobiMatrix& j, double x);

// All eigenvalues, ascending and with multiplicity, each to within tol.
// Sturm-count bisection inside the Gershgorin interval. Throws NumericError
// when tol < 4 * machine epsilon * (Gershgorin width).
std::vector<double> eigenvalues(const JacobiMatrix& j, double tol);

// Eigenvalues of finite boxes over several starting points.
struct EigenPool {
    int box = 0;
    std::vector<std::vector<double>> samples;  // ascending eigenvalues per starting point

    std::size_t total() const noexcept;
    std::pair<double, double> range() const noexcept;
};

// For each omega, the eigenvalues of the box over orbit positions
// first_site .. first_site + n - 1. Parallel over omegas.
EigenPool eigen_pool(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas, int n, double tol,
                     std::int64_t first_site = 1, unsigned threads = 1);

struct IDSTable {
    std::vector<double> energies;
    std::vector<double> k_values;
    std::vector<double> boundary_sensitivity;  // |k - k with the box shifted by one site|
    double max_boundary_sensitivity = 0.0;
    int box = 0;
    int sample_count = 0;
};

// k(E) = (number of eigenvalues <= E) / n, averaged over the samples.
IDSTable ids(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas, int n,
             const EnergyGrid& grid, double tol, unsigned threads = 1);

// Same from precomputed pools; `shifted` uses the boxes moved by one site.
IDSTable ids_from_pools(const EigenPool& pool, const EigenPool& shifted, const EnergyGrid& grid);

struct ThoulessEstimate {
    double energy = 0.0;
    double gamma = 0.0;
    std::size_t used = 0;
    std::size_t excluded = 0;
    double exclusion_radius = 0.0;
    bool ill_conditioned = false;  // more than 1% of the terms excluded
};

inline constexpr std::size_t kMinThoulessPool = 1000;

// Mean of log|E - E_j| over the pooled eigenvalues, skipping terms with
// |E - E_j| < radius. A negative radius selects the default: one tenth of the
// mean spacing of the pooled eigenvalues (range / pooled count). Boxes over
// different starting points share their eigenvalue clusters, so a per-box
// spacing would cut away genuine neighbours and bias the average upward.
ThoulessEstimate thouless_gamma(double energy, const EigenPool& pool, double radius = -1.0);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Eigenvalues thickened by merge_gap (on each side) and merged into disjoint
// ascending intervals.
std::vector<Interval> merge_intervals(std::span<const double> points, double merge_gap);

std::vector<Interval> spectrum_approx(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas,
                                      int n, double merge_gap, double tol, unsigned threads = 1);
std::vector<Interval> spectrum_from_pool(const EigenPool& pool, double merge_gap);

}  // namespace ergospec
