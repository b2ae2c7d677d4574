#include "ergospec/format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace ergospec {

std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += header[i];
    }
    text_ += '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(std::string_view(format_real(x))); }

CsvWriter& CsvWriter::cell(long long x) { return cell(std::string_view(std::to_string(x))); }

CsvWriter& CsvWriter::cell(unsigned long long x) { return cell(std::string_view(std::to_string(x))); }

CsvWriter& CsvWriter::cell(std::string_view s) {
    if (in_row_ == columns_) {
        throw std::logic_error("CsvWriter: too many cells in row");
    }
    if (in_row_) text_ += ',';
    text_ += s;
    ++in_row_;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw std::logic_error("CsvWriter: incomplete row");
    }
    text_ += '\n';
    in_row_ = 0;
}

nlohmann::json torus_json(TorusPoint t) {
    return {{"raw", t.raw}, {"value", format_real(t.to_double())}};
}

nlohmann::json point_json(const Point& p) {
    if (const auto* t = std::get_if<TorusPoint>(&p)) {
        auto j = torus_json(*t);
        j["kind"] = "torus";
        return j;
    }
    if (const auto* t = std::get_if<TorusPair>(&p)) {
        return {{"kind", "pair"}, {"x", torus_json(t->x)}, {"y", torus_json(t->y)}};
    }
    const auto& s = std::get<SymbolPoint>(p);
    return {{"kind", "symbol"}, {"key", s.key}, {"offset", s.offset}};
}

nlohmann::json witness_json(const WitnessPair& w, bool verified) {
    return {{"omega_a", point_json(w.omega_a)}, {"omega_b", point_json(w.omega_b)}, {"m", w.m},
            {"eps", w.eps}, {"delta", w.delta}, {"left_a", w.left_a.values}, {"left_b", w.left_b.values},
            {"v0_a", w.v0_a}, {"v0_b", w.v0_b}, {"verified", verified}};
}

nlohmann::json search_json(const WitnessSearchResult& r, int m, double eps, double delta_min) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& w : r.pairs) pairs.push_back(witness_json(w, verify_witness(w, eps, delta_min)));
    return {{"m", m},
            {"eps", eps},
            {"delta_min", delta_min},
            {"pairs", pairs},
            {"pairs_found", r.pairs_found},
            {"rejected", r.rejected},
            {"max_delta", r.max_delta}};
}

std::string dump_json(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ergospec
