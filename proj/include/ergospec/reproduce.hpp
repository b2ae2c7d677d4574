#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace ergospec {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;      // one-line summary of the measured quantities
    nlohmann::json measured;  // full numbers, written into summary.json
};

// Artifact file name -> exact bytes.
using ArtifactSet = std::map<std::string, std::string>;

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    ArtifactSet artifacts;
    std::map<std::string, double> timings;  // seconds per criterion, never written into artifacts

    bool all_passed() const noexcept;
};

// Runs criteria 1-7 with their tolerances and run sizes fixed here; every
// random draw derives from `seed`. With check_determinism, criterion 8 repeats
// the suite with 1 and 8 workers and compares the artifacts byte for byte
// against each other and against this run.
AcceptanceReport run_acceptance(std::uint64_t seed, unsigned threads, bool check_determinism = true);

// "PASS  [3] name: detail"
std::string format_criterion(const CriterionResult& c);

}  // namespace ergospec
