#include "ergospec/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ergospec/error.hpp"

namespace ergospec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_breakpoints(const std::vector<TorusPoint>& bps, std::size_t pieces) {
    if (bps.empty()) {
        throw DomainError("piecewise function needs at least one breakpoint");
    }
    if (bps.size() != pieces) {
        throw DomainError("piecewise function: " + std::to_string(bps.size()) + " breakpoints but " +
                          std::to_string(pieces) + " pieces");
    }
    for (std::size_t i = 1; i < bps.size(); ++i) {
        if (!(bps[i - 1] < bps[i])) {
            throw DomainError("piecewise function: breakpoints must be strictly increasing");
        }
    }
}

// Index of the piece containing x: the last breakpoint <= x, wrapping to the
// final piece below the first breakpoint.
std::size_t piece_index(const std::vector<TorusPoint>& bps, TorusPoint x) noexcept {
    const auto it = std::upper_bound(bps.begin(), bps.end(), x);
    if (it == bps.begin()) {
        return bps.size() - 1;
    }
    return static_cast<std::size_t>(it - bps.begin()) - 1;
}

double cosine_piece(const CosinePiece& p, TorusPoint x) noexcept {
    return p.amplitude * std::cos(kTwoPi * (x.to_double() + p.phase));
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

}  // namespace

SamplingFunction::SamplingFunction(Variant v) : v_(std::move(v)) {
    bound_ = std::visit(overloaded{
                            [](const Cosine& c) { return std::abs(c.lambda); },
                            [](const Step& s) {
                                double b = 0.0;
                                for (double x : s.values) b = std::max(b, std::abs(x));
                                return b;
                            },
                            [](const PiecewiseCosine& p) {
                                double b = 0.0;
                                for (const auto& piece : p.pieces) b = std::max(b, std::abs(piece.amplitude));
                                return b;
                            },
                            [](const SymbolTable& t) {
                                double b = 0.0;
                                for (double x : t.values) b = std::max(b, std::abs(x));
                                return b;
                            },
                        },
                        v_);
}

SamplingFunction SamplingFunction::cosine(double lambda) {
    check_finite(lambda, "coupling");
    return SamplingFunction(Cosine{lambda});
}

SamplingFunction SamplingFunction::step(std::vector<TorusPoint> breakpoints, std::vector<double> values) {
    check_breakpoints(breakpoints, values.size());
    for (double v : values) check_finite(v, "step value");
    return SamplingFunction(Step{std::move(breakpoints), std::move(values)});
}

SamplingFunction SamplingFunction::piecewise_cosine(std::vector<TorusPoint> breakpoints,
                                                    std::vector<CosinePiece> pieces) {
    check_breakpoints(breakpoints, pieces.size());
    for (const auto& p : pieces) {
        check_finite(p.amplitude, "piece amplitude");
        check_finite(p.phase, "piece phase");
    }
    return SamplingFunction(PiecewiseCosine{std::move(breakpoints), std::move(pieces)});
}

SamplingFunction SamplingFunction::symbol_table(std::vector<double> values) {
    if (values.empty()) {
        throw DomainError("symbol table needs at least one value");
    }
    for (double v : values) check_finite(v, "symbol value");
    return SamplingFunction(SymbolTable{std::move(values)});
}

SamplingFunction SamplingFunction::constant(double c) {
    return step({TorusPoint{0}}, {c});
}

double SamplingFunction::operator()(TorusPoint x) const {
    return std::visit(overloaded{
                          [&](const Cosine& c) { return c.lambda * std::cos(kTwoPi * x.to_double()); },
                          [&](const Step& s) { return s.values[piece_index(s.breakpoints, x)]; },
                          [&](const PiecewiseCosine& p) {
                              return cosine_piece(p.pieces[piece_index(p.breakpoints, x)], x);
                          },
                          [](const SymbolTable&) -> double {
                              throw DomainError("symbol table cannot be evaluated at a torus point");
                          },
                      },
                      v_);
}

std::vector<TorusPoint> SamplingFunction::discontinuity_set() const {
    std::vector<TorusPoint> out;
    const std::vector<TorusPoint>* bps = nullptr;
    if (const auto* s = std::get_if<Step>(&v_)) bps = &s->breakpoints;
    if (const auto* p = std::get_if<PiecewiseCosine>(&v_)) bps = &p->breakpoints;
    if (bps == nullptr) return out;
    for (TorusPoint b : *bps) {
        if (one_sided_limits(*this, b).jump > 0.0) out.push_back(b);
    }
    return out;
}

double SamplingFunction::largest_jump() const {
    double j = 0.0;
    for (TorusPoint b : discontinuity_set()) j = std::max(j, one_sided_limits(*this, b).jump);
    return j;
}

std::string SamplingFunction::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const Cosine& c) { os << "cos(lambda=" << c.lambda << ")"; },
                   [&](const Step& s) {
                       os << "step(";
                       for (std::size_t i = 0; i < s.values.size(); ++i) {
                           os << (i ? ", " : "") << s.breakpoints[i].to_double() << ":" << s.values[i];
                       }
                       os << ")";
                   },
                   [&](const PiecewiseCosine& p) {
                       os << "pcos(";
                       for (std::size_t i = 0; i < p.pieces.size(); ++i) {
                           os << (i ? ", " : "") << p.breakpoints[i].to_double() << ":" << p.pieces[i].amplitude
                              << ":" << p.pieces[i].phase;
                       }
                       os << ")";
                   },
                   [&](const SymbolTable& t) {
                       os << "table(";
                       for (std::size_t i = 0; i < t.values.size(); ++i) os << (i ? ", " : "") << t.values[i];
                       os << ")";
                   },
               },
               v_);
    return os.str();
}

double evaluate(const SamplingFunction& f, const Dynamics& dyn, const Point& omega) {
    if (const auto* t = std::get_if<TorusPoint>(&omega)) {
        if (!std::holds_alternative<Rotation>(dyn)) {
            throw DomainError("torus point used with " + describe(dyn));
        }
        return f(*t);
    }
    if (const auto* p = std::get_if<TorusPair>(&omega)) {
        if (!std::holds_alternative<SkewShift>(dyn)) {
            throw DomainError("torus pair used with " + describe(dyn));
        }
        return f(p->y);
    }
    const auto* table = std::get_if<SymbolTable>(&f.variant());
    const auto* shift = std::get_if<SymbolShift>(&dyn);
    if (table == nullptr || shift == nullptr) {
        throw DomainError("symbol point needs a symbol table and a symbol shift");
    }
    if (table->values.size() < shift->alphabet) {
        throw DomainError("symbol table has " + std::to_string(table->values.size()) + " values but alphabet has " +
                          std::to_string(shift->alphabet) + " letters");
    }
    return table->values[symbol_at(*shift, std::get<SymbolPoint>(omega))];
}

OneSidedLimits one_sided_limits(const SamplingFunction& f, TorusPoint omega0) {
    OneSidedLimits lim;
    auto finish = [&] {
        lim.jump = std::abs(lim.right - lim.left);
        if (lim.jump <= kJumpTolerance * std::max(1.0, f.bound())) lim.jump = 0.0;
        return lim;
    };
    const auto& v = f.variant();
    if (std::holds_alternative<SymbolTable>(v)) {
        throw DomainError("one-sided limits are defined for torus functions only");
    }
    if (const auto* c = std::get_if<Cosine>(&v)) {
        lim.left = lim.right = c->lambda * std::cos(kTwoPi * omega0.to_double());
        return finish();
    }
    if (const auto* s = std::get_if<Step>(&v)) {
        const std::size_t i = piece_index(s->breakpoints, omega0);
        lim.right = s->values[i];
        const bool at_break = s->breakpoints[i] == omega0;
        lim.left = at_break ? s->values[(i + s->values.size() - 1) % s->values.size()] : lim.right;
        return finish();
    }
    const auto& p = std::get<PiecewiseCosine>(v);
    const std::size_t i = piece_index(p.breakpoints, omega0);
    lim.right = cosine_piece(p.pieces[i], omega0);
    const bool at_break = p.breakpoints[i] == omega0;
    lim.left = at_break ? cosine_piece(p.pieces[(i + p.pieces.size() - 1) % p.pieces.size()], omega0) : lim.right;
    return finish();
}

void fill_potential(const SamplingFunction& f, const Dynamics& dyn, const Point& omega, std::int64_t n_first,
                    std::span<double> out) {
    if (out.empty()) return;
    const Point start = iterate(dyn, omega, n_first);
    // Validates the point kind before the fast loops below.
    out[0] = evaluate(f, dyn, start);
    if (const auto* rot = std::get_if<Rotation>(&dyn)) {
        TorusPoint x = std::get<TorusPoint>(start);
        for (std::size_t i = 1; i < out.size(); ++i) {
            x = x + rot->alpha;
            out[i] = f(x);
        }
        return;
    }
    if (const auto* skew = std::get_if<SkewShift>(&dyn)) {
        TorusPair p = std::get<TorusPair>(start);
        for (std::size_t i = 1; i < out.size(); ++i) {
            p = TorusPair{p.x + skew->alpha, p.y + p.x};
            out[i] = f(p.y);
        }
        return;
    }
    const auto& shift = std::get<SymbolShift>(dyn);
    const auto& table = std::get<SymbolTable>(f.variant());
    if (table.values.size() < shift.alphabet) {
        throw DomainError("symbol table shorter than the alphabet");
    }
    SymbolPoint s = std::get<SymbolPoint>(start);
    for (std::size_t i = 1; i < out.size(); ++i) {
        s.offset = static_cast<std::int64_t>(static_cast<std::uint64_t>(s.offset) + 1);
        out[i] = table.values[symbol_at(shift, s)];
    }
}

PotentialWindow potential(const SamplingFunction& f, const Dynamics& dyn, const Point& omega, std::int64_t n_min,
                          std::int64_t n_max) {
    if (n_min > n_max) {
        throw DomainError("potential: n_min > n_max");
    }
    const auto len = static_cast<unsigned long long>(n_max - n_min) + 1;
    if (len > static_cast<unsigned long long>(kMaxWindowElements)) {
        throw ResourceError("potential: window of " + std::to_string(len) + " sites exceeds the memory budget");
    }
    PotentialWindow w{n_min, n_max, std::vector<double>(len), omega, dyn, f};
    fill_potential(f, dyn, omega, n_min, w.values);
    return w;
}

PotentialWindow shift_window(const PotentialWindow& w, std::int64_t k) {
    return potential(w.f, w.dynamics, iterate(w.dynamics, w.origin, k), w.n_min, w.n_max);
}

}  // namespace ergospec
