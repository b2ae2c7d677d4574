#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ergospec/determinism.hpp"
#include "ergospec/dynamics.hpp"

#include <json.hpp>

namespace ergospec {

// 17 significant digits, shortest of fixed/scientific ("%.17g"), locale-free.
std::string format_real(double x);

// Comma-separated table with a header row and LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& cell(double x);
    CsvWriter& cell(long long x);
    CsvWriter& cell(unsigned long long x);
    CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
    CsvWriter& cell(bool b) { return cell(static_cast<long long>(b ? 1 : 0)); }
    CsvWriter& cell(std::string_view s);
    CsvWriter& cell(const char* s) { return cell(std::string_view(s)); }
    void end_row();

    const std::string& str() const noexcept { return text_; }

private:
    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::string text_;
};

// {"raw": <exact u64>, "value": "<17 digits>"} per coordinate.
nlohmann::json torus_json(TorusPoint t);
nlohmann::json point_json(const Point& p);

// Both starting points (exact raw values), m, eps, delta, both left windows
// inline and the values at 0.
nlohmann::json witness_json(const WitnessPair& w, bool verified);
nlohmann::json search_json(const WitnessSearchResult& r, int m, double eps, double delta_min);

// Keys sorted (std::map order), two-space indent, trailing newline.
std::string dump_json(const nlohmann::json& j);

// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

}  // namespace ergospec
