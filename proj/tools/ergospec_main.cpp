// Command-line front end: ergospec <command> --config PATH [--out DIR] [--threads N] [--seed N]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ergospec/commands.hpp"
#include "ergospec/config.hpp"
#include "ergospec/error.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Ergodic Schroedinger operators: Lyapunov exponents, spectra, IDS and non-determinism witnesses"};
    app.set_version_flag("--version", ergospec::kVersion);

    std::string command;
    std::string config_path;
    std::string out_dir;
    unsigned threads = 1;
    std::uint64_t seed = 0;

    app.add_option("command", command, "Command to run")
        ->required()
        ->check(CLI::IsMember(ergospec::command_names()));
    app.add_option("--config", config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory (created if missing); defaults to the config `out`, then .");
    app.add_option("--threads", threads, "Worker threads, 0 = one per hardware thread");
    auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the config value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ergospec::kExitConfig;
    }

    std::ifstream in(config_path, std::ios::binary);
    std::stringstream text;
    text << in.rdbuf();

    ergospec::ExperimentConfig cfg;
    try {
        cfg = ergospec::parse_config(text.str());
    } catch (const ergospec::ConfigError& e) {
        std::cerr << config_path << (e.line() > 0 ? ":" : ": ") << e.what() << "\n";
        return ergospec::kExitConfig;
    }

    ergospec::RunOptions opts;
    opts.out_dir = !out_dir.empty() ? out_dir : !cfg.out.empty() ? cfg.out : ".";
    opts.threads = threads;
    if (*seed_opt) opts.seed = seed;
    return ergospec::run(command, cfg, opts, std::cout, std::cerr);
}
