#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergospec/cocycle.hpp"
#include "ergospec/dynamics.hpp"
#include "ergospec/sampling.hpp"

namespace ergospec {

// Experiment description read from a flat `key = value` file.
//
//   # golden-mean rotation with a step potential
//   dyn      = rotation(alpha=golden)
//   f        = step(0:1, 0.5:0)
//   energies = grid(-3, 3, 61)
//   seed     = 42
//
// Values are a number, a name, a call `name(arg, key=arg, ...)`, or a comma
// list of those. Torus points accept `golden`, `sqrt2m1`, `p/q`, a raw
// fixed-point value `0x...`, or a decimal. Sampling functions:
//   cos(lambda=L)             L cos(2 pi x)
//   step(b:v, ...)            right-continuous steps, breakpoints ascending
//   pcos(b:A:phase, ...)      A cos(2 pi (x + phase)) on each piece
//   table(v0, v1, ...)        symbol values, for symbols(k=.., seed=..)
//   const(c)                  V == c
// Dynamics: rotation(alpha=..), skewshift(alpha=..), symbols(k=.., seed=..).
struct ConfigEntry {
    std::string key;
    std::string value;  // canonical spelling
    int line = 0;
    friend bool operator==(const ConfigEntry&, const ConfigEntry&) = default;
};

struct ExperimentConfig {
    std::vector<ConfigEntry> entries;           // keys given in the file, in order
    std::vector<std::string> defaults_applied;  // keys left at their defaults

    Dynamics dynamics = Rotation{constants::golden};
    SamplingFunction f = SamplingFunction::cosine(2.0);
    EnergyGrid energies{-3.0, 3.0, 61};
    LyapunovSettings lyapunov{};
    int seeds = 1;  // starting points averaged in a Lyapunov sweep
    int box = 500;
    int samples = 8;
    double tol = 1e-10;
    double merge_gap = 1e-3;
    double threshold = 0.02;
    int m = 10;
    std::vector<int> m_values{5, 10, 20, 40};
    double eps = 0.0;
    std::optional<double> delta_min;  // unset: half the largest jump of f
    std::size_t max_pairs = 1000;
    std::optional<TorusPoint> omega;
    std::optional<TorusPoint> omega0;
    std::optional<TorusPoint> omega1;
    int depth = 8;
    int window = 10;
    int stride = 4;
    std::optional<std::uint64_t> seed;
    std::string out;

    // delta_min, or half the largest jump of f, or half its bound if f is continuous.
    double effective_delta_min() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

// Throws ConfigError carrying the line and column of the offending text.
// Unknown and repeated keys are rejected.
ExperimentConfig parse_config(std::string_view text);

// `key = value` per explicit entry, in file order, canonical spacing.
std::string serialize(const ExperimentConfig& cfg);

// FNV-1a of serialize(cfg).
std::uint64_t config_hash(const ExperimentConfig& cfg);

TorusPoint parse_torus_point(std::string_view text);

// All keys the grammar accepts.
const std::vector<std::string>& config_keys();

}  // namespace ergospec
