#include "ergospec/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ergospec/error.hpp"
#include "ergospec/parallel.hpp"

namespace ergospec {

namespace {

void check_settings(const LyapunovSettings& s) {
    if (s.n_steps < 1 || s.renorm_every < 1 || s.block_count < 1) {
        throw DomainError("lyapunov: n_steps, renorm_every and block_count must be positive");
    }
    if (s.n_steps < static_cast<std::int64_t>(s.block_count) * s.renorm_every) {
        throw DomainError("lyapunov: n_steps must be at least block_count * renorm_every");
    }
}

// Returns nullopt if the norm passed the ceiling before a renormalization.
std::optional<LyapunovEstimate> propagate(double energy, std::span<const double> v, std::int64_t n_steps,
                                          int renorm_every, int block_count) {
    LyapunovEstimate est;
    est.energy = energy;
    est.n_steps = n_steps;
    est.renorm_used = renorm_every;
    est.block_slopes.reserve(static_cast<std::size_t>(block_count));

    const std::int64_t block_len = n_steps / block_count;
    double x = 1.0;
    double y = 0.0;
    double total = 0.0;

    auto renormalize = [&](double& acc) {
        const double norm = std::sqrt(x * x + y * y);
        if (!(norm <= kNormCeiling) || norm == 0.0) return false;
        acc += std::log(norm);
        x /= norm;
        y /= norm;
        return true;
    };

    std::int64_t i = 0;
    for (int b = 0; b < block_count; ++b) {
        const std::int64_t end = (b + 1 == block_count) ? n_steps : i + block_len;
        const std::int64_t len = end - i;
        double acc = 0.0;
        int since = 0;
        for (; i < end; ++i) {
            const double t = (energy - v[static_cast<std::size_t>(i)]) * x - y;
            y = x;
            x = t;
            if (++since == renorm_every) {
                if (!renormalize(acc)) return std::nullopt;
                since = 0;
            }
        }
        if (since != 0 && !renormalize(acc)) return std::nullopt;
        est.block_slopes.push_back(acc / static_cast<double>(len));
        total += acc;
    }
    est.gamma = total / static_cast<double>(n_steps);

    if (block_count > 1) {
        double mean = 0.0;
        for (double s : est.block_slopes) mean += s;
        mean /= block_count;
        double var = 0.0;
        for (double s : est.block_slopes) var += (s - mean) * (s - mean);
        var /= (block_count - 1);
        est.std_error = std::sqrt(var / block_count);
    }
    return est;
}

}  // namespace

LyapunovEstimate lyapunov_from_potential(double energy, std::span<const double> v, const LyapunovSettings& settings) {
    check_settings(settings);
    if (!std::isfinite(energy)) {
        throw NumericError("lyapunov: energy must be finite");
    }
    if (static_cast<std::int64_t>(v.size()) < settings.n_steps) {
        throw DomainError("lyapunov: potential shorter than n_steps");
    }
    if (auto est = propagate(energy, v, settings.n_steps, settings.renorm_every, settings.block_count)) {
        return *std::move(est);
    }
    if (auto est = propagate(energy, v, settings.n_steps, 1, settings.block_count)) {
        return *std::move(est);
    }
    throw NumericError("lyapunov: transfer-matrix norm exceeds 1e300 even with per-step renormalization at E = " +
                       std::to_string(energy));
}

LyapunovEstimate lyapunov(double energy, const SamplingFunction& f, const Dynamics& dyn, const Point& omega,
                          const LyapunovSettings& settings) {
    check_settings(settings);
    if (settings.n_steps > kMaxWindowElements) {
        throw ResourceError("lyapunov: n_steps exceeds the memory budget");
    }
    std::vector<double> v(static_cast<std::size_t>(settings.n_steps));
    fill_potential(f, dyn, omega, 1, v);
    return lyapunov_from_potential(energy, v, settings);
}

double EnergyGrid::at(int i) const noexcept {
    if (i == count - 1) return e_max;
    return e_min + (e_max - e_min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

double EnergyGrid::spacing() const noexcept {
    return (e_max - e_min) / static_cast<double>(count - 1);
}

SweepTable lyapunov_sweep(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> omegas,
                          const EnergyGrid& grid, const LyapunovSettings& settings, unsigned threads) {
    if (grid.count < 1 || !(grid.e_min <= grid.e_max) || (grid.count > 1 && grid.e_min == grid.e_max)) {
        throw DomainError("lyapunov_sweep: invalid energy grid");
    }
    if (omegas.empty()) {
        throw DomainError("lyapunov_sweep: at least one starting point is required");
    }
    check_settings(settings);
    const auto total = static_cast<unsigned long long>(settings.n_steps) * omegas.size();
    if (total > static_cast<unsigned long long>(kMaxWindowElements)) {
        throw ResourceError("lyapunov_sweep: n_steps * seed count exceeds the memory budget");
    }

    std::vector<std::vector<double>> potentials(omegas.size());
    parallel_for(omegas.size(), threads, [&](std::size_t s) {
        potentials[s].resize(static_cast<std::size_t>(settings.n_steps));
        fill_potential(f, dyn, omegas[s], 1, potentials[s]);
    });

    SweepTable table;
    table.grid = grid;
    table.rows.resize(static_cast<std::size_t>(grid.count));
    parallel_for(table.rows.size(), threads, [&](std::size_t i) {
        SweepRow& row = table.rows[i];
        row.energy = grid.at(static_cast<int>(i));
        row.n_steps = settings.n_steps;
        row.seed_count = static_cast<int>(omegas.size());
        double sum = 0.0;
        double var = 0.0;
        int ok = 0;
        for (const auto& v : potentials) {
            try {
                row.per_seed.push_back(lyapunov_from_potential(row.energy, v, settings));
                sum += row.per_seed.back().gamma;
                var += row.per_seed.back().std_error * row.per_seed.back().std_error;
                ++ok;
            } catch (const NumericError& e) {
                row.flagged = true;
                row.message = e.what();
            }
        }
        if (ok > 0) {
            row.gamma = sum / ok;
            row.std_error = std::sqrt(var) / ok;
        } else {
            row.gamma = std::numeric_limits<double>::quiet_NaN();
            row.std_error = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return table;
}

VanishingSetEstimate vanishing_set(const SweepTable& table, double threshold) {
    if (table.grid.count < 2) {
        throw DomainError("vanishing_set: needs a grid with at least two energies");
    }
    if (static_cast<int>(table.rows.size()) != table.grid.count) {
        throw DomainError("vanishing_set: table does not match its grid");
    }
    VanishingSetEstimate out;
    out.threshold = threshold;
    out.grid = table.grid;
    const double h = table.grid.spacing();
    // The exponent is nonnegative, so {gamma < thr} is empty for thr <= 0 even
    // when a finite-run estimate dips just below zero.
    auto measure = [&](double thr, std::vector<double>* energies) {
        int n = 0;
        if (thr <= 0.0) return 0.0;
        for (const auto& row : table.rows) {
            if (!row.flagged && row.gamma < thr) {
                ++n;
                if (energies) energies->push_back(row.energy);
            }
        }
        return std::min(h * n, table.grid.length());
    };
    out.measure_estimate = measure(threshold, &out.flagged_energies);
    out.measure_half_threshold = measure(threshold / 2, nullptr);
    out.measure_double_threshold = measure(threshold * 2, nullptr);
    return out;
}

}  // namespace ergospec
