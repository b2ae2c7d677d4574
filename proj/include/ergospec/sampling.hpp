#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ergospec/dynamics.hpp"

namespace ergospec {

// x -> lambda * cos(2 pi x)
struct Cosine {
    double lambda = 1.0;
    friend bool operator==(const Cosine&, const Cosine&) = default;
};

// Piecewise constant on the circle. Piece i is [b_i, b_{i+1}); the last piece
// wraps through 0 back to b_0. Right-continuous at every breakpoint.
struct Step {
    std::vector<TorusPoint> breakpoints;
    std::vector<double> values;
    friend bool operator==(const Step&, const Step&) = default;
};

// x -> amplitude * cos(2 pi (x + phase)), phase in turns.
struct CosinePiece {
    double amplitude = 0.0;
    double phase = 0.0;
    friend bool operator==(const CosinePiece&, const CosinePiece&) = default;
};

// Same piece layout and right-continuity as Step, with a cosine on each piece.
struct PiecewiseCosine {
    std::vector<TorusPoint> breakpoints;
    std::vector<CosinePiece> pieces;
    friend bool operator==(const PiecewiseCosine&, const PiecewiseCosine&) = default;
};

// Value per letter of a symbol shift.
struct SymbolTable {
    std::vector<double> values;
    friend bool operator==(const SymbolTable&, const SymbolTable&) = default;
};

struct OneSidedLimits {
    double left = 0.0;
    double right = 0.0;
    double jump = 0.0;  // |right - left|, zeroed below kJumpTolerance * max(1, bound)
};

// Relative threshold under which two one-sided limits count as equal.
inline constexpr double kJumpTolerance = 1e-12;

// A bounded sampling function f with its declared range bound and a symbolic
// description of its discontinuities. Construct through the factories, which
// enforce the invariants.
class SamplingFunction {
public:
    using Variant = std::variant<Cosine, Step, PiecewiseCosine, SymbolTable>;

    static SamplingFunction cosine(double lambda);
    static SamplingFunction step(std::vector<TorusPoint> breakpoints, std::vector<double> values);
    static SamplingFunction piecewise_cosine(std::vector<TorusPoint> breakpoints, std::vector<CosinePiece> pieces);
    static SamplingFunction symbol_table(std::vector<double> values);
    // Step with a single piece: V == c.
    static SamplingFunction constant(double c);

    const Variant& variant() const noexcept { return v_; }
    bool on_torus() const noexcept { return !std::holds_alternative<SymbolTable>(v_); }

    // The declared bound: |f| <= bound() everywhere.
    double bound() const noexcept { return bound_; }

    // Evaluation on a circle coordinate; throws DomainError for SymbolTable.
    double operator()(TorusPoint x) const;

    // Points where the left and right limits differ, ascending.
    std::vector<TorusPoint> discontinuity_set() const;
    // Largest jump over the discontinuity set (0 if continuous).
    double largest_jump() const;

    std::string describe() const;

    friend bool operator==(const SamplingFunction&, const SamplingFunction&) = default;

private:
    explicit SamplingFunction(Variant v);
    Variant v_;
    double bound_ = 0.0;
};

// f(omega) under the given dynamics. Torus functions read the circle point
// (the second coordinate for skew-shift pairs); symbol tables read the letter
// at position 0. Mismatched kinds throw DomainError.
double evaluate(const SamplingFunction& f, const Dynamics& dyn, const Point& omega);
inline double evaluate(const SamplingFunction& f, TorusPoint x) { return f(x); }

// Limits of f from the left and right at omega0, read off the piece definitions.
OneSidedLimits one_sided_limits(const SamplingFunction& f, TorusPoint omega0);

// Writes f(T^n omega) for n = n_first, n_first + 1, ... into out.
void fill_potential(const SamplingFunction& f, const Dynamics& dyn, const Point& omega, std::int64_t n_first,
                    std::span<double> out);

// Finite slab V_omega(n_min..n_max) together with what generated it.
struct PotentialWindow {
    std::int64_t n_min = 0;
    std::int64_t n_max = 0;
    std::vector<double> values;
    Point origin;
    Dynamics dynamics;
    SamplingFunction f = SamplingFunction::constant(0.0);

    std::size_t size() const noexcept { return values.size(); }
    double at(std::int64_t n) const { return values.at(static_cast<std::size_t>(n - n_min)); }
};

PotentialWindow potential(const SamplingFunction& f, const Dynamics& dyn, const Point& omega, std::int64_t n_min,
                          std::int64_t n_max);

// Window of S^k V over the same index range: origin moves to T^k omega and the
// values are recomputed from it.
PotentialWindow shift_window(const PotentialWindow& w, std::int64_t k);

}  // namespace ergospec
