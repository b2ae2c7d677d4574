#include "ergospec/determinism.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cmath>
#include <numeric>

#include "ergospec/error.hpp"
#include "ergospec/parallel.hpp"

namespace ergospec {

namespace {

// Bucket keys of the left windows V(-m_max..-1) and the values V(0) for every sample.
struct WindowBank {
    std::size_t count = 0;
    int m_max = 0;
    std::vector<std::int64_t> keys;  // row s holds the keys of V(-m_max..-1)
    std::vector<double> v0;

    std::span<const std::int64_t> key_row(std::size_t s, int m) const {
        return std::span(keys).subspan(s * m_max + static_cast<std::size_t>(m_max - m), static_cast<std::size_t>(m));
    }
};

std::int64_t bucket_key(double v, double eps) {
    if (eps == 0.0) {
        if (v == 0.0) v = 0.0;  // folds -0.0 onto +0.0
        return std::bit_cast<std::int64_t>(v);
    }
    const double q = std::floor(v / eps);
    if (q >= 9.2e18) return LLONG_MAX;
    if (q <= -9.2e18) return LLONG_MIN;
    return static_cast<std::int64_t>(q);
}

WindowBank build_bank(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> samples, int m_max,
                      double eps, unsigned threads) {
    if (m_max < 1) {
        throw DomainError("window length m must be positive");
    }
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw DomainError("eps must be finite and non-negative");
    }
    const auto cells = static_cast<unsigned long long>(m_max + 1) * samples.size();
    if (cells > static_cast<unsigned long long>(kMaxWindowElements)) {
        throw ResourceError("witness search: samples * window exceeds the memory budget");
    }
    WindowBank bank;
    bank.count = samples.size();
    bank.m_max = m_max;
    bank.keys.resize(samples.size() * static_cast<std::size_t>(m_max));
    bank.v0.resize(samples.size());

    constexpr std::size_t kChunk = 1024;
    const std::size_t chunks = (samples.size() + kChunk - 1) / kChunk;
    parallel_for(chunks, threads, [&](std::size_t c) {
        std::vector<double> buf(static_cast<std::size_t>(m_max) + 1);
        const std::size_t end = std::min(samples.size(), (c + 1) * kChunk);
        for (std::size_t s = c * kChunk; s < end; ++s) {
            fill_potential(f, dyn, samples[s], -m_max, buf);
            const std::size_t row = s * static_cast<std::size_t>(m_max);
            for (int i = 0; i < m_max; ++i) {
                bank.keys[row + i] = bucket_key(buf[i], eps);
            }
            bank.v0[s] = buf[static_cast<std::size_t>(m_max)];
        }
    });
    return bank;
}

// Sample indices sorted so equal keys (over the last m entries) are adjacent.
std::vector<std::uint32_t> grouped_order(const WindowBank& bank, int m) {
    std::vector<std::uint32_t> order(bank.count);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        const auto ka = bank.key_row(a, m);
        const auto kb = bank.key_row(b, m);
        if (std::lexicographical_compare(ka.begin(), ka.end(), kb.begin(), kb.end())) return true;
        if (std::lexicographical_compare(kb.begin(), kb.end(), ka.begin(), ka.end())) return false;
        return a < b;
    });
    return order;
}

// Calls visit(members) for each bucket of two or more samples, in key order.
template <class Visit>
void for_each_bucket(const WindowBank& bank, int m, Visit&& visit) {
    const auto order = grouped_order(bank, m);
    std::size_t i = 0;
    std::vector<std::uint32_t> members;
    while (i < order.size()) {
        std::size_t j = i + 1;
        const auto ki = bank.key_row(order[i], m);
        while (j < order.size()) {
            const auto kj = bank.key_row(order[j], m);
            if (!std::equal(ki.begin(), ki.end(), kj.begin())) break;
            ++j;
        }
        if (j - i >= 2) {
            members.assign(order.begin() + static_cast<std::ptrdiff_t>(i), order.begin() + static_cast<std::ptrdiff_t>(j));
            std::stable_sort(members.begin(), members.end(),
                             [&](std::uint32_t a, std::uint32_t b) { return bank.v0[a] < bank.v0[b]; });
            visit(std::span<const std::uint32_t>(members));
        }
        i = j;
    }
}

void check_witness_inputs(const SamplingFunction& f, TorusPoint omega0, int m) {
    if (!f.on_torus()) {
        throw DomainError("witness construction needs a torus sampling function");
    }
    if (m < 1) {
        throw DomainError("window length m must be positive");
    }
    if (one_sided_limits(f, omega0).jump <= 0.0) {
        throw GuardError("f is continuous at omega0; no jump to split");
    }
}

// Smallest circle distance from T^n x (n in [n_lo, n_hi]) to a discontinuity of f.
std::uint64_t orbit_margin(const std::vector<TorusPoint>& disc, const Rotation& rot, TorusPoint x, std::int64_t n_lo,
                           std::int64_t n_hi) {
    std::uint64_t margin = ~std::uint64_t{0};
    if (disc.empty()) return margin;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        const TorusPoint p = x + rot.alpha.scaled(n);
        for (TorusPoint b : disc) margin = std::min(margin, circle_distance_raw(p, b));
    }
    return margin;
}

WitnessPair make_pair(const SamplingFunction& f, const Dynamics& dyn, Point a, Point b, int m) {
    if (b < a) std::swap(a, b);
    WitnessPair w;
    w.omega_a = a;
    w.omega_b = b;
    w.m = m;
    w.left_a = potential(f, dyn, a, -m, -1);
    w.left_b = potential(f, dyn, b, -m, -1);
    w.v0_a = evaluate(f, dyn, a);
    w.v0_b = evaluate(f, dyn, b);
    for (std::size_t i = 0; i < w.left_a.values.size(); ++i) {
        w.eps = std::max(w.eps, std::abs(w.left_a.values[i] - w.left_b.values[i]));
    }
    w.delta = std::abs(w.v0_a - w.v0_b);
    return w;
}

}  // namespace

bool verify_witness(const WitnessPair& w, double eps_bound, double delta_bound) {
    if (!(w.omega_a < w.omega_b) || w.m < 1) return false;
    const Dynamics& dyn = w.left_a.dynamics;
    const SamplingFunction& f = w.left_a.f;
    double eps = 0.0;
    for (int n = -w.m; n <= -1; ++n) {
        const double va = evaluate(f, dyn, iterate(dyn, w.omega_a, n));
        const double vb = evaluate(f, dyn, iterate(dyn, w.omega_b, n));
        if (va != w.left_a.at(n) || vb != w.left_b.at(n)) return false;
        eps = std::max(eps, std::abs(va - vb));
    }
    const double va0 = evaluate(f, dyn, w.omega_a);
    const double vb0 = evaluate(f, dyn, w.omega_b);
    const double delta = std::abs(va0 - vb0);
    return va0 == w.v0_a && vb0 == w.v0_b && eps == w.eps && delta == w.delta && eps <= eps_bound &&
           delta >= delta_bound;
}

WitnessPair construct_witness(const SamplingFunction& f, const Rotation& rot, TorusPoint omega0, int m,
                              double eps_target, ApproachSides sides) {
    check_witness_inputs(f, omega0, m);
    if (sides.a == sides.b) {
        throw DomainError("construct_witness: the two approach sides must differ");
    }
    if (!(eps_target >= 0.0)) {
        throw DomainError("construct_witness: eps_target must be non-negative");
    }
    const auto disc = f.discontinuity_set();
    const std::uint64_t margin = orbit_margin(disc, rot, omega0, -m, -1);
    if (margin <= kGuardRadiusRaw) {
        throw GuardError("construct_witness: T^n omega0 lies within 2^-40 of a discontinuity for some -m <= n <= -1");
    }
    const double jump = one_sided_limits(f, omega0).jump;
    const Dynamics dyn = rot;

    std::uint64_t h = std::min(margin / 2, std::uint64_t{1} << 60);
    for (; h > 0; h >>= 1) {
        const TorusPoint left{omega0.raw - h};
        const TorusPoint right{omega0.raw + h};
        const TorusPoint a = sides.a == Side::left ? left : right;
        const TorusPoint b = sides.b == Side::left ? left : right;
        WitnessPair w = make_pair(f, dyn, a, b, m);
        if (w.eps <= eps_target && w.delta >= jump / 2) {
            return w;
        }
    }
    throw ResolutionExhausted("construct_witness: no offset above 2^-64 meets eps_target");
}

WitnessSearchResult witness_search(const SamplingFunction& f, const Dynamics& dyn, std::span<const Point> samples,
                                   int m, double eps, double delta_min, std::size_t max_pairs, unsigned threads) {
    if (!(delta_min > 0.0)) {
        throw DomainError("witness_search: delta_min must be positive");
    }
    WitnessSearchResult res;
    if (samples.size() < 2) return res;
    const WindowBank bank = build_bank(f, dyn, samples, m, eps, threads);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen;
    for_each_bucket(bank, m, [&](std::span<const std::uint32_t> g) {
        res.max_delta = std::max(res.max_delta, bank.v0[g.back()] - bank.v0[g.front()]);
        // g is sorted by v0: for each i the partners form a suffix.
        std::size_t j = 0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            j = std::max(j, i + 1);
            while (j < g.size() && bank.v0[g[j]] - bank.v0[g[i]] < delta_min) ++j;
            res.pairs_found += g.size() - j;
            for (std::size_t k = j; k < g.size() && chosen.size() < max_pairs; ++k) chosen.emplace_back(g[i], g[k]);
        }
    });

    for (const auto& [ia, ib] : chosen) {
        WitnessPair w = make_pair(f, dyn, samples[ia], samples[ib], m);
        const double eps_bound = eps;
        if (verify_witness(w, eps_bound, delta_min)) {
            res.pairs.push_back(std::move(w));
        } else {
            ++res.rejected;
        }
    }
    return res;
}

WitnessSearchResult witness_search(const SamplingFunction& f, const Dynamics& dyn, int m, double eps,
                                   double delta_min, std::size_t sample_count, std::uint64_t seed,
                                   std::size_t max_pairs, unsigned threads) {
    const auto samples = sample_points(dyn, sample_count, seed);
    return witness_search(f, dyn, samples, m, eps, delta_min, max_pairs, threads);
}

DefectProfile defect_profile(const SamplingFunction& f, const Dynamics& dyn, std::span<const int> m_values, double eps,
                             std::span<const Point> samples, unsigned threads) {
    if (m_values.empty()) {
        throw DomainError("defect_profile: m_values must be non-empty");
    }
    for (std::size_t i = 0; i < m_values.size(); ++i) {
        if (m_values[i] < 1 || (i > 0 && m_values[i] <= m_values[i - 1])) {
            throw DomainError("defect_profile: m_values must be positive and strictly ascending");
        }
    }
    DefectProfile prof;
    prof.m_values.assign(m_values.begin(), m_values.end());
    prof.eps = eps;
    prof.sample_count = samples.size();
    if (samples.size() < 2) {
        prof.defect.assign(m_values.size(), 0.0);
        prof.pairs_found.assign(m_values.size(), 0);
        return prof;
    }
    const WindowBank bank = build_bank(f, dyn, samples, m_values.back(), eps, threads);
    for (int m : m_values) {
        double defect = 0.0;
        std::uint64_t pairs = 0;
        for_each_bucket(bank, m, [&](std::span<const std::uint32_t> g) {
            defect = std::max(defect, bank.v0[g.back()] - bank.v0[g.front()]);
            const std::uint64_t k = g.size();
            std::uint64_t same = 0;
            std::size_t run = 1;
            for (std::size_t i = 1; i <= g.size(); ++i) {
                if (i < g.size() && bank.v0[g[i]] == bank.v0[g[i - 1]]) {
                    ++run;
                } else {
                    same += static_cast<std::uint64_t>(run) * (run - 1) / 2;
                    run = 1;
                }
            }
            pairs += k * (k - 1) / 2 - same;
        });
        prof.defect.push_back(defect);
        prof.pairs_found.push_back(pairs);
    }
    return prof;
}

std::vector<TranslateStep> translate_convergence(const SamplingFunction& f, const Rotation& rot, TorusPoint omega,
                                                 TorusPoint omega1, int depth, TranslateOptions opts) {
    if (!f.on_torus()) {
        throw DomainError("translate_convergence needs a torus sampling function");
    }
    if (depth < 1 || opts.window < 0 || opts.stride < 1) {
        throw DomainError("translate_convergence: depth >= 1, window >= 0, stride >= 1 required");
    }
    if (rot.alpha.raw == 0) {
        throw DomainError("translate_convergence: rotation by 0 has no returns");
    }
    const int max_window = opts.window * depth;
    const auto disc = f.discontinuity_set();
    if (orbit_margin(disc, rot, omega1, -max_window, max_window) <= kGuardRadiusRaw) {
        throw GuardError("translate_convergence: orbit of omega1 comes within 2^-40 of a discontinuity");
    }

    const auto cf = continued_fraction(rot.alpha, opts.stride * depth);
    std::vector<std::int64_t> horizons;
    for (int i = 1; i <= depth; ++i) {
        const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(opts.stride) * i, cf.convergents.size() - 1);
        const std::uint64_t q = cf.convergents[k].q;
        horizons.push_back(static_cast<std::int64_t>(std::min<std::uint64_t>(q, kDefaultReturnHorizon)));
    }

    // n = 0 is the starting candidate; records from return_times only improve on it.
    std::vector<ReturnTime> records{{0, circle_distance_raw(omega, omega1), circle_distance(omega, omega1)}};
    if (records.front().distance_raw != 0) {
        const Dynamics dyn = rot;
        for (const auto& r : return_times(dyn, Point{omega}, Point{omega1}, INT_MAX, horizons.back())) {
            if (r.distance_raw < records.back().distance_raw) records.push_back(r);
        }
    }

    auto sup_discrepancy = [&](TorusPoint start, int window) {
        double sup = 0.0;
        for (int k = -window; k <= window; ++k) {
            const double a = f(start + rot.alpha.scaled(k));
            const double b = f(omega1 + rot.alpha.scaled(k));
            sup = std::max(sup, std::abs(a - b));
        }
        return sup;
    };

    std::vector<TranslateStep> out;
    for (int i = 1; i <= depth; ++i) {
        const std::int64_t horizon = horizons[static_cast<std::size_t>(i - 1)];
        const ReturnTime* best = &records.front();
        for (const auto& r : records) {
            if (r.n <= horizon) best = &r;
        }
        TranslateStep st;
        st.level = i;
        st.horizon = horizon;
        st.n = best->n;
        st.distance = best->distance;
        st.distance_raw = best->distance_raw;
        st.window = opts.window;
        const TorusPoint start = omega + rot.alpha.scaled(best->n);
        st.discrepancy = sup_discrepancy(start, opts.window);
        st.growing_window = opts.window * i;
        st.growing_discrepancy = sup_discrepancy(start, st.growing_window);
        out.push_back(st);
    }
    return out;
}

}  // namespace ergospec
