#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergospec/dynamics.hpp"
#include "ergospec/sampling.hpp"

namespace ergospec {

// Row-major 2x2 real matrix [[a, b], [c, d]].
struct TransferMatrix {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    double determinant() const noexcept { return a * d - b * c; }
    friend TransferMatrix operator*(const TransferMatrix& l, const TransferMatrix& r) noexcept {
        return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
    }
    friend bool operator==(const TransferMatrix&, const TransferMatrix&) = default;
};

// One step of the Schroedinger recursion psi(n+1) = (E - v) psi(n) - psi(n-1):
// [[E - v, -1], [1, 0]].
constexpr TransferMatrix single_step(double energy, double v) noexcept {
    return {energy - v, -1.0, 1.0, 0.0};
}

struct LyapunovSettings {
    std::int64_t n_steps = 1'000'000;
    int renorm_every = 16;
    int block_count = 32;
    friend bool operator==(const LyapunovSettings&, const LyapunovSettings&) = default;
};

struct LyapunovEstimate {
    double energy = 0.0;
    double gamma = 0.0;      // nats per lattice step
    std::int64_t n_steps = 0;
    double std_error = 0.0;  // from the spread of the block averages
    std::vector<double> block_slopes;
    int renorm_used = 0;     // 1 when the overflow guard fired
};

// Overflow guard threshold on the propagated vector norm.
inline constexpr double kNormCeiling = 1e300;

// Top Lyapunov exponent of the cocycle over the potential values
// v[0..n_steps) = V(1..n_steps), by propagating (1, 0) and accumulating the
// log of its norm. The vector is renormalized every renorm_every steps and at
// every block boundary. If the norm passes kNormCeiling the run is repeated
// once with renorm_every = 1; a second failure throws NumericError.
LyapunovEstimate lyapunov_from_potential(double energy, std::span<const double> v, const LyapunovSettings& settings);

// Same, with V(n) = f(T^n omega) for n = 1..n_steps.
LyapunovEstimate lyapunov(double energy, const SamplingFunction& f, const Dynamics& dyn, const Point& omega,
                          const LyapunovSettings& settings);

// Uniform closed grid containing both endpoints.
struct EnergyGrid {
    double e_min = -3.0;
    double e_max = 3.0;
    int count = 2;

    double at(int i) const noexcept;
    double spacing() const noexcept;
    double length() const noexcept { return e_max - e_min; }
    friend bool operator==(const EnergyGrid&, const EnergyGrid&) = default;
};

struct SweepRow {
    double energy = 0.0;
    double gamma = 0.0;      // mean over seeds
    double std_error = 0.0;  // sqrt(sum se_i^2) / seed_count
    std::int64_t n_steps = 0;
    int seed_count = 0;
    bool flagged = false;    // a seed hit a numeric error; gamma covers the others
    std::string message;
    std::vector<LyapunovEstimate> per_seed;
};

struct SweepTable {
    EnergyGrid grid;
    std::vector<SweepRow> rows;  // one per grid point, ascending in energy
};

// Lyapunov estimates at every grid energy, averaged over the given starting
// points. Energies run concurrently on `threads` workers (0 = auto); the
// table does not depend on the worker count.
SweepTable lyapunov_sweep(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas,
                          const EnergyGrid& grid, const LyapunovSettings& settings, unsigned threads = 1);

struct VanishingSetEstimate {
    double threshold = 0.0;
    EnergyGrid grid;
    double measure_estimate = 0.0;  // spacing * #{E : gamma(E) < threshold}, capped at the grid length
    double measure_half_threshold = 0.0;
    double measure_double_threshold = 0.0;
    std::vector<double> flagged_energies;  // energies counted at `threshold`
};

// Thresholded proxy for the Lebesgue measure of {E : gamma(E) = 0}.
// Flagged sweep rows are never counted; a threshold <= 0 gives measure 0.
VanishingSetEstimate vanishing_set(const SweepTable& table, double threshold);

}  // namespace ergospec
