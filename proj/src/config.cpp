#include "ergospec/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include "ergospec/error.hpp"
#include "ergospec/format.hpp"

namespace ergospec {

namespace {

struct Arg {
    std::string key;  // empty for positional
    std::string text;
    int column = 0;
};

struct Item {
    std::string head;
    bool call = false;
    std::vector<Arg> args;
    int column = 0;
};

std::string canonical(const std::vector<Item>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i].head;
        if (!items[i].call) continue;
        out += '(';
        for (std::size_t a = 0; a < items[i].args.size(); ++a) {
            if (a) out += ", ";
            const auto& arg = items[i].args[a];
            if (!arg.key.empty()) out += arg.key + "=";
            out += arg.text;
        }
        out += ')';
    }
    return out;
}

bool atom_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == ':' || c == '/' || c == '+' || c == '-' ||
           c == '_';
}

// Recursive-descent parser over one value; columns are 1-based in the line.
class ValueParser {
public:
    ValueParser(std::string_view text, int line, int col0) : s_(text), line_(line), col0_(col0) {}

    std::vector<Item> parse() {
        std::vector<Item> items;
        skip();
        if (pos_ == s_.size()) fail("missing value");
        items.push_back(item());
        skip();
        while (pos_ < s_.size() && s_[pos_] == ',') {
            ++pos_;
            items.push_back(item());
            skip();
        }
        if (pos_ != s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return items;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(msg, line_, col0_ + static_cast<int>(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    std::string atom() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && atom_char(s_[pos_])) ++pos_;
        if (pos_ == start) {
            if (pos_ == s_.size()) fail("unexpected end of value");
            fail(std::string("unexpected '") + s_[pos_] + "'");
        }
        return std::string(s_.substr(start, pos_ - start));
    }

    Item item() {
        skip();
        Item it;
        it.column = col0_ + static_cast<int>(pos_);
        it.head = atom();
        skip();
        if (pos_ < s_.size() && s_[pos_] == '(') {
            ++pos_;
            it.call = true;
            skip();
            if (pos_ < s_.size() && s_[pos_] == ')') {
                ++pos_;
                return it;
            }
            for (;;) {
                skip();
                Arg a;
                a.column = col0_ + static_cast<int>(pos_);
                std::string first = atom();
                skip();
                if (pos_ < s_.size() && s_[pos_] == '=') {
                    ++pos_;
                    a.key = std::move(first);
                    skip();
                    a.column = col0_ + static_cast<int>(pos_);
                    a.text = atom();
                } else {
                    a.text = std::move(first);
                }
                it.args.push_back(std::move(a));
                skip();
                if (pos_ < s_.size() && s_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                if (pos_ < s_.size() && s_[pos_] == ')') {
                    ++pos_;
                    break;
                }
                fail("expected ',' or ')'");
            }
        }
        return it;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
    int col0_;
};

double to_double(std::string_view t) {
    double v = 0.0;
    const char* b = t.data();
    const char* e = b + t.size();
    if (!t.empty() && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) {
        throw DomainError("expected a number, got '" + std::string(t) + "'");
    }
    return v;
}

template <class Int>
Int to_integer(std::string_view t) {
    Int v{};
    const char* b = t.data();
    const char* e = b + t.size();
    if (!t.empty() && *b == '+') ++b;
    const auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) {
        throw DomainError("expected an integer, got '" + std::string(t) + "'");
    }
    return v;
}

// Wraps value conversion so any DomainError becomes a positioned ConfigError.
template <class F>
auto at(int line, int column, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what(), line, column);
    }
}

const Arg& single_arg(const Item& it, std::string_view key, int line) {
    if (it.args.size() != 1 || (!it.args[0].key.empty() && it.args[0].key != key)) {
        throw ConfigError(it.head + "(...) takes one argument '" + std::string(key) + "'", line, it.column);
    }
    return it.args[0];
}

// Named arguments with defaults, positional arguments filled in order.
std::map<std::string, const Arg*> bind_args(const Item& it, const std::vector<std::string>& names, int line) {
    std::map<std::string, const Arg*> out;
    std::size_t next = 0;
    for (const auto& a : it.args) {
        std::string key = a.key;
        if (key.empty()) {
            if (next >= names.size()) throw ConfigError("too many arguments to " + it.head, line, a.column);
            key = names[next++];
        } else if (std::find(names.begin(), names.end(), key) == names.end()) {
            throw ConfigError("unknown argument '" + key + "' to " + it.head, line, a.column);
        }
        if (out.count(key)) throw ConfigError("argument '" + key + "' given twice", line, a.column);
        out[key] = &a;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = s.find(sep, start);
        parts.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
        if (p == std::string_view::npos) break;
        start = p + 1;
    }
    return parts;
}

Dynamics parse_dynamics(const Item& it, int line) {
    if (!it.call) throw ConfigError("dynamics must be rotation(..), skewshift(..) or symbols(..)", line, it.column);
    if (it.head == "rotation" || it.head == "skewshift") {
        const Arg& a = single_arg(it, "alpha", line);
        const TorusPoint alpha = at(line, a.column, [&] { return parse_torus_point(a.text); });
        if (alpha.raw == 0) throw ConfigError("alpha must be nonzero", line, a.column);
        if (it.head == "rotation") return Rotation{alpha};
        return SkewShift{alpha};
    }
    if (it.head == "symbols") {
        const auto args = bind_args(it, {"k", "seed"}, line);
        if (!args.count("k") || !args.count("seed")) {
            throw ConfigError("symbols(k=.., seed=..) needs both arguments", line, it.column);
        }
        const Arg& k = *args.at("k");
        const Arg& sd = *args.at("seed");
        const auto alphabet = at(line, k.column, [&] { return to_integer<std::uint32_t>(k.text); });
        if (alphabet < 1 || alphabet > 65536) throw ConfigError("k must be in [1, 65536]", line, k.column);
        const auto seed = at(line, sd.column, [&] { return to_integer<std::uint64_t>(sd.text); });
        return SymbolShift{alphabet, seed};
    }
    throw ConfigError("unknown dynamics '" + it.head + "'", line, it.column);
}

SamplingFunction parse_function(const Item& it, int line) {
    if (!it.call) {
        throw ConfigError("sampling function must be cos(..), step(..), pcos(..), table(..) or const(..)", line,
                          it.column);
    }
    if (it.head == "cos") {
        const Arg& a = single_arg(it, "lambda", line);
        return at(line, a.column, [&] { return SamplingFunction::cosine(to_double(a.text)); });
    }
    if (it.head == "const") {
        const Arg& a = single_arg(it, "c", line);
        return at(line, a.column, [&] { return SamplingFunction::constant(to_double(a.text)); });
    }
    if (it.head == "table") {
        std::vector<double> vals;
        for (const auto& a : it.args) {
            if (!a.key.empty()) throw ConfigError("table(...) takes positional values", line, a.column);
            vals.push_back(at(line, a.column, [&] { return to_double(a.text); }));
        }
        return at(line, it.column, [&] { return SamplingFunction::symbol_table(std::move(vals)); });
    }
    if (it.head == "step" || it.head == "pcos") {
        const std::size_t want = it.head == "step" ? 2 : 3;
        std::vector<TorusPoint> bps;
        std::vector<double> vals;
        std::vector<CosinePiece> pieces;
        for (const auto& a : it.args) {
            const auto parts = split(a.text, ':');
            if (!a.key.empty() || parts.size() != want) {
                throw ConfigError(it.head == "step" ? "step pieces are written breakpoint:value"
                                                    : "pcos pieces are written breakpoint:amplitude:phase",
                                  line, a.column);
            }
            at(line, a.column, [&] {
                bps.push_back(parse_torus_point(parts[0]));
                if (want == 2) {
                    vals.push_back(to_double(parts[1]));
                } else {
                    pieces.push_back({to_double(parts[1]), to_double(parts[2])});
                }
                return 0;
            });
        }
        return at(line, it.column, [&] {
            return want == 2 ? SamplingFunction::step(std::move(bps), std::move(vals))
                             : SamplingFunction::piecewise_cosine(std::move(bps), std::move(pieces));
        });
    }
    throw ConfigError("unknown sampling function '" + it.head + "'", line, it.column);
}

EnergyGrid parse_grid(const Item& it, int line) {
    if (!it.call || it.head != "grid") throw ConfigError("energies must be grid(min, max, count)", line, it.column);
    const auto args = bind_args(it, {"min", "max", "count"}, line);
    if (args.size() != 3) throw ConfigError("grid needs min, max and count", line, it.column);
    EnergyGrid g;
    g.e_min = at(line, args.at("min")->column, [&] { return to_double(args.at("min")->text); });
    g.e_max = at(line, args.at("max")->column, [&] { return to_double(args.at("max")->text); });
    g.count = at(line, args.at("count")->column, [&] { return to_integer<int>(args.at("count")->text); });
    if (g.count < 1 || g.count > 1'000'000) throw ConfigError("grid count must be in [1, 10^6]", line, it.column);
    if (g.e_min > g.e_max || (g.count > 1 && g.e_min == g.e_max)) {
        throw ConfigError("grid needs min < max (or count = 1 with min = max)", line, it.column);
    }
    if (g.count == 1 && g.e_min != g.e_max) throw ConfigError("a one-point grid needs min = max", line, it.column);
    return g;
}

const Item& scalar(const std::vector<Item>& items, int line) {
    if (items.size() != 1 || items[0].call) {
        throw ConfigError("expected a single value", line, items.empty() ? 0 : items[0].column);
    }
    return items[0];
}

template <class T>
T ranged(const std::vector<Item>& items, int line, T lo, T hi) {
    const Item& it = scalar(items, line);
    T v;
    if constexpr (std::is_floating_point_v<T>) {
        v = at(line, it.column, [&] { return to_double(it.head); });
    } else {
        v = at(line, it.column, [&] { return to_integer<T>(it.head); });
    }
    if (v < lo || v > hi) {
        throw ConfigError("value out of range [" + format_real(static_cast<double>(lo)) + ", " +
                              format_real(static_cast<double>(hi)) + "]",
                          line, it.column);
    }
    return v;
}

const Item& scalar_call(const std::vector<Item>& items, int line) {
    if (items.size() != 1) throw ConfigError("expected a single value", line, items.empty() ? 0 : items[1].column);
    return items[0];
}

TorusPoint torus(const std::vector<Item>& items, int line) {
    const Item& it = scalar(items, line);
    return at(line, it.column, [&] { return parse_torus_point(it.head); });
}

using Setter = std::function<void(ExperimentConfig&, const std::vector<Item>&, int)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"dyn", [](auto& c, const auto& v, int l) { c.dynamics = parse_dynamics(scalar_call(v, l), l); }},
        {"f", [](auto& c, const auto& v, int l) { c.f = parse_function(scalar_call(v, l), l); }},
        {"energies", [](auto& c, const auto& v, int l) { c.energies = parse_grid(scalar_call(v, l), l); }},
        {"n_steps",
         [](auto& c, const auto& v, int l) {
             c.lyapunov.n_steps = ranged<std::int64_t>(v, l, 1, kMaxWindowElements);
         }},
        {"renorm_every", [](auto& c, const auto& v, int l) { c.lyapunov.renorm_every = ranged<int>(v, l, 1, 1024); }},
        {"blocks", [](auto& c, const auto& v, int l) { c.lyapunov.block_count = ranged<int>(v, l, 1, 4096); }},
        {"seeds", [](auto& c, const auto& v, int l) { c.seeds = ranged<int>(v, l, 1, 1024); }},
        {"box", [](auto& c, const auto& v, int l) { c.box = ranged<int>(v, l, 8, 1 << 20); }},
        {"samples", [](auto& c, const auto& v, int l) { c.samples = ranged<int>(v, l, 1, 1 << 24); }},
        {"tol", [](auto& c, const auto& v, int l) { c.tol = ranged<double>(v, l, 1e-15, 1.0); }},
        {"merge_gap", [](auto& c, const auto& v, int l) { c.merge_gap = ranged<double>(v, l, 0.0, 10.0); }},
        {"threshold", [](auto& c, const auto& v, int l) { c.threshold = ranged<double>(v, l, 0.0, 100.0); }},
        {"m", [](auto& c, const auto& v, int l) { c.m = ranged<int>(v, l, 1, 100000); }},
        {"m_values",
         [](auto& c, const auto& v, int l) {
             c.m_values.clear();
             for (const auto& it : v) {
                 if (it.call) throw ConfigError("m_values is a comma list of integers", l, it.column);
                 const int m = ranged<int>({it}, l, 1, 100000);
                 if (!c.m_values.empty() && m <= c.m_values.back()) {
                     throw ConfigError("m_values must be strictly ascending", l, it.column);
                 }
                 c.m_values.push_back(m);
             }
         }},
        {"eps", [](auto& c, const auto& v, int l) { c.eps = ranged<double>(v, l, 0.0, 1e6); }},
        {"delta_min", [](auto& c, const auto& v, int l) { c.delta_min = ranged<double>(v, l, 1e-300, 1e6); }},
        {"max_pairs",
         [](auto& c, const auto& v, int l) { c.max_pairs = ranged<std::size_t>(v, l, 0, std::size_t{10'000'000}); }},
        {"omega", [](auto& c, const auto& v, int l) { c.omega = torus(v, l); }},
        {"omega0", [](auto& c, const auto& v, int l) { c.omega0 = torus(v, l); }},
        {"omega1", [](auto& c, const auto& v, int l) { c.omega1 = torus(v, l); }},
        {"depth", [](auto& c, const auto& v, int l) { c.depth = ranged<int>(v, l, 1, 64); }},
        {"window", [](auto& c, const auto& v, int l) { c.window = ranged<int>(v, l, 0, 100000); }},
        {"stride", [](auto& c, const auto& v, int l) { c.stride = ranged<int>(v, l, 1, 16); }},
        {"seed",
         [](auto& c, const auto& v, int l) {
             c.seed = ranged<std::uint64_t>(v, l, 0, ~std::uint64_t{0});
         }},
        {"out",
         [](auto& c, const auto& v, int l) {
             c.out = scalar(v, l).head;
         }},
    };
    return table;
}

}  // namespace

TorusPoint parse_torus_point(std::string_view t) {
    if (t == "golden") return constants::golden;
    if (t == "sqrt2m1") return constants::sqrt2m1;
    if (t.size() > 2 && t[0] == '0' && (t[1] == 'x' || t[1] == 'X')) {
        std::uint64_t raw = 0;
        const auto r = std::from_chars(t.data() + 2, t.data() + t.size(), raw, 16);
        if (r.ec != std::errc() || r.ptr != t.data() + t.size()) {
            throw DomainError("bad raw fixed-point literal '" + std::string(t) + "'");
        }
        return TorusPoint{raw};
    }
    if (const auto slash = t.find('/'); slash != std::string_view::npos) {
        const auto p = to_integer<std::int64_t>(t.substr(0, slash));
        const auto q = to_integer<std::uint64_t>(t.substr(slash + 1));
        if (q == 0) throw DomainError("zero denominator in '" + std::string(t) + "'");
        return TorusPoint::from_ratio(p, q);
    }
    return TorusPoint::from_double(to_double(t));
}

double ExperimentConfig::effective_delta_min() const {
    if (delta_min) return *delta_min;
    const double jump = f.on_torus() ? f.largest_jump() : 0.0;
    if (jump > 0.0) return jump / 2;
    return f.bound() > 0.0 ? f.bound() / 2 : 1.0;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.dynamics == b.dynamics && a.f == b.f && a.energies == b.energies && a.lyapunov == b.lyapunov &&
           a.seeds == b.seeds && a.box == b.box && a.samples == b.samples && a.tol == b.tol &&
           a.merge_gap == b.merge_gap && a.threshold == b.threshold && a.m == b.m && a.m_values == b.m_values &&
           a.eps == b.eps && a.delta_min == b.delta_min && a.max_pairs == b.max_pairs && a.omega == b.omega &&
           a.omega0 == b.omega0 && a.omega1 == b.omega1 && a.depth == b.depth && a.window == b.window &&
           a.stride == b.stride && a.seed == b.seed && a.out == b.out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& [name, _] : setters()) k.push_back(name);
        return k;
    }();
    return keys;
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

        std::size_t p = 0;
        while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
        if (p == line.size()) {
            if (end == text.size()) break;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no, static_cast<int>(p) + 1);
        std::size_t kend = eq;
        while (kend > p && std::isspace(static_cast<unsigned char>(line[kend - 1]))) --kend;
        const std::string key(line.substr(p, kend - p));
        if (key.empty()) throw ConfigError("missing key", line_no, static_cast<int>(p) + 1);

        const auto& table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (it == table.end()) throw ConfigError("unknown key '" + key + "'", line_no, static_cast<int>(p) + 1);
        for (const auto& e : cfg.entries) {
            if (e.key == key) {
                throw ConfigError("key '" + key + "' repeated (first on line " + std::to_string(e.line) + ")", line_no,
                                  static_cast<int>(p) + 1);
            }
        }
        const auto items = ValueParser(line.substr(eq + 1), line_no, static_cast<int>(eq) + 2).parse();
        it->second(cfg, items, line_no);
        cfg.entries.push_back({key, canonical(items), line_no});
        if (end == text.size()) break;
    }
    if (cfg.lyapunov.n_steps < static_cast<std::int64_t>(cfg.lyapunov.block_count) * cfg.lyapunov.renorm_every) {
        throw ConfigError("n_steps must be at least blocks * renorm_every");
    }
    for (const auto& key : config_keys()) {
        const bool given = std::any_of(cfg.entries.begin(), cfg.entries.end(), [&](const auto& e) { return e.key == key; });
        if (!given) cfg.defaults_applied.push_back(key);
    }
    return cfg;
}

std::string serialize(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& e : cfg.entries) out += e.key + " = " + e.value + "\n";
    return out;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    return fnv1a(serialize(cfg));
}

}  // namespace ergospec
