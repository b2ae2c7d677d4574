#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ergospec/config.hpp"

namespace ergospec {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // other module errors, or failed acceptance criteria
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitResource = 4,
};

struct RunOptions {
    std::filesystem::path out_dir = ".";
    unsigned threads = 1;                // 0 = one per hardware thread
    std::optional<std::uint64_t> seed;   // overrides the config seed
};

// The commands `run` understands.
const std::vector<std::string>& command_names();

// Runs one command and writes its outputs plus `<command>.manifest.json` into
// opts.out_dir. Progress and results go to `out`, errors to `err`. When a
// module fails midway the manifest is still written, with status "failed",
// the error, and whatever outputs were already complete.
int run(std::string_view command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err);

// Exit code for the exception currently being handled.
int exit_code_for_current_exception(std::string& message);

}  // namespace ergospec
