#include "ergospec/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "ergospec/cocycle.hpp"
#include "ergospec/determinism.hpp"
#include "ergospec/error.hpp"
#include "ergospec/format.hpp"
#include "ergospec/reproduce.hpp"
#include "ergospec/spectra.hpp"

namespace ergospec {

namespace {

using Clock = std::chrono::steady_clock;

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

// Per-run bookkeeping: outputs written so far, warnings and timings, all of
// which end up in the manifest.
class Context {
public:
    Context(std::string command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out)
        : command(std::move(command)), cfg(cfg), opts(opts), out(out) {
        if (opts.seed) seed = opts.seed;
        else seed = cfg.seed;
    }

    std::uint64_t require_seed() const {
        if (!seed) {
            throw ConfigError("command '" + command + "' draws random samples: set `seed` in the config or pass --seed");
        }
        return *seed;
    }

    std::vector<Point> sample(std::size_t count) const { return sample_points(cfg.dynamics, count, require_seed()); }

    void write(const std::string& name, const std::string& bytes) {
        std::filesystem::create_directories(opts.out_dir);
        const auto path = opts.out_dir / name;
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw ResourceError("cannot write " + path.string());
        outputs.push_back(name);
    }

    template <class F>
    auto timed(const std::string& op, F&& body) -> decltype(body()) {
        const auto t0 = Clock::now();
        if constexpr (std::is_void_v<decltype(body())>) {
            body();
            timings[op] += std::chrono::duration<double>(Clock::now() - t0).count();
        } else {
            auto r = body();
            timings[op] += std::chrono::duration<double>(Clock::now() - t0).count();
            return r;
        }
    }

    void write_manifest(const std::string& status, const std::string& error, double wall) {
        nlohmann::json j;
        j["command"] = command;
        j["config_hash"] = hex64(config_hash(cfg));
        j["config"] = serialize(cfg);
        j["defaults_applied"] = cfg.defaults_applied;
        j["version"] = kVersion;
        j["wall_clock_seconds"] = wall;
        j["timings"] = timings;
        j["warnings"] = warnings;
        j["outputs"] = outputs;
        j["status"] = status;
        j["threads"] = opts.threads;
        if (seed) j["seed"] = *seed;
        if (!error.empty()) j["error"] = error;
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream f(opts.out_dir / (command + ".manifest.json"), std::ios::binary | std::ios::trunc);
        f << dump_json(j);
    }

    std::string command;
    const ExperimentConfig& cfg;
    const RunOptions& opts;
    std::ostream& out;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> outputs;
    std::vector<std::string> warnings;
    std::map<std::string, double> timings;
};

// Starting points for the cocycle: `omega` if given, otherwise `seeds` draws.
std::vector<Point> cocycle_points(Context& ctx) {
    if (ctx.cfg.omega) {
        if (ctx.cfg.seeds > 1) ctx.warnings.push_back("omega is set; seeds > 1 ignored");
        return {point_for(ctx.cfg.dynamics, *ctx.cfg.omega)};
    }
    return ctx.sample(static_cast<std::size_t>(ctx.cfg.seeds));
}

const Rotation& require_rotation(const ExperimentConfig& cfg, const std::string& command) {
    const auto* rot = std::get_if<Rotation>(&cfg.dynamics);
    if (!rot) throw UnsupportedDynamics(command + " is defined for circle rotations only");
    return *rot;
}

int cmd_lyapunov(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto omegas = cocycle_points(ctx);
    const auto table = ctx.timed("lyapunov_sweep", [&] {
        return lyapunov_sweep(cfg.f, cfg.dynamics, omegas, cfg.energies, cfg.lyapunov, ctx.opts.threads);
    });
    CsvWriter csv({"E", "gamma", "stderr", "n_steps", "seed_count", "flagged"});
    for (const auto& r : table.rows) {
        csv.cell(r.energy).cell(r.gamma).cell(r.std_error).cell(static_cast<long long>(r.n_steps));
        csv.cell(r.seed_count).cell(r.flagged);
        csv.end_row();
        if (r.flagged) ctx.warnings.push_back("E=" + format_real(r.energy) + ": " + r.message);
    }
    ctx.write("lyapunov.csv", csv.str());
    if (cfg.energies.count >= 2) {
        const auto vs = vanishing_set(table, cfg.threshold);
        ctx.write("vanishing_set.json",
                  dump_json({{"threshold", vs.threshold},
                             {"measure_estimate", vs.measure_estimate},
                             {"measure_half_threshold", vs.measure_half_threshold},
                             {"measure_double_threshold", vs.measure_double_threshold},
                             {"flagged_energies", vs.flagged_energies}}));
        ctx.out << "measure of {gamma < " << format_real(cfg.threshold) << "}: " << format_real(vs.measure_estimate)
                << "\n";
    }
    ctx.out << "wrote " << table.rows.size() << " energies\n";
    return kExitOk;
}

int cmd_ids(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto omegas = ctx.sample(static_cast<std::size_t>(cfg.samples));
    const auto table = ctx.timed("ids", [&] {
        return ids(cfg.f, cfg.dynamics, omegas, cfg.box, cfg.energies, cfg.tol, ctx.opts.threads);
    });
    CsvWriter csv({"E", "k", "boundary_sensitivity"});
    for (std::size_t i = 0; i < table.energies.size(); ++i) {
        csv.cell(table.energies[i]).cell(table.k_values[i]).cell(table.boundary_sensitivity[i]);
        csv.end_row();
    }
    ctx.write("ids.csv", csv.str());
    ctx.out << "max boundary sensitivity " << format_real(table.max_boundary_sensitivity) << "\n";
    return kExitOk;
}

int cmd_thouless(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto omegas = ctx.sample(static_cast<std::size_t>(cfg.samples));
    const auto pool = ctx.timed("eigen_pool", [&] {
        return eigen_pool(cfg.f, cfg.dynamics, omegas, cfg.box, cfg.tol, 1, ctx.opts.threads);
    });
    const std::size_t cocycle_count = std::min<std::size_t>(omegas.size(), static_cast<std::size_t>(cfg.seeds));
    const std::span<const Point> cocycle_omegas(omegas.data(), cocycle_count);
    const auto table = ctx.timed("lyapunov_sweep", [&] {
        return lyapunov_sweep(cfg.f, cfg.dynamics, cocycle_omegas, cfg.energies, cfg.lyapunov, ctx.opts.threads);
    });
    CsvWriter csv({"E", "gamma_cocycle", "gamma_thouless", "difference", "excluded", "ill_conditioned"});
    double worst = 0.0;
    ctx.timed("thouless", [&] {
        for (const auto& r : table.rows) {
            const auto t = thouless_gamma(r.energy, pool);
            const double diff = std::abs(r.gamma - t.gamma);
            worst = std::max(worst, diff);
            csv.cell(r.energy).cell(r.gamma).cell(t.gamma).cell(diff);
            csv.cell(static_cast<unsigned long long>(t.excluded)).cell(t.ill_conditioned);
            csv.end_row();
            if (t.ill_conditioned) ctx.warnings.push_back("E=" + format_real(r.energy) + ": Thouless sum ill-conditioned");
            if (r.flagged) ctx.warnings.push_back("E=" + format_real(r.energy) + ": " + r.message);
        }
    });
    ctx.write("thouless_check.csv", csv.str());
    ctx.out << "max |gamma - gamma_T| " << format_real(worst) << "\n";
    return kExitOk;
}

int cmd_spectrum(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto omegas = ctx.sample(static_cast<std::size_t>(cfg.samples));
    const auto intervals = ctx.timed("spectrum_approx", [&] {
        return spectrum_approx(cfg.f, cfg.dynamics, omegas, cfg.box, cfg.merge_gap, cfg.tol, ctx.opts.threads);
    });
    nlohmann::json list = nlohmann::json::array();
    double covered = 0.0;
    for (const auto& iv : intervals) {
        list.push_back({iv.lo, iv.hi});
        covered += iv.hi - iv.lo;
    }
    ctx.write("spectrum.json", dump_json({{"box", cfg.box},
                                          {"samples", cfg.samples},
                                          {"merge_gap", cfg.merge_gap},
                                          {"intervals", list},
                                          {"total_length", covered}}));
    ctx.out << intervals.size() << " intervals, total length " << format_real(covered) << "\n";
    return kExitOk;
}

int cmd_witness(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double delta_min = cfg.effective_delta_min();
    nlohmann::json doc;
    if (cfg.omega0) {
        const auto& rot = require_rotation(cfg, ctx.command);
        nlohmann::json constructed = nlohmann::json::array();
        ctx.timed("construct_witness", [&] {
            for (int m : cfg.m_values) {
                const auto w = construct_witness(cfg.f, rot, *cfg.omega0, m, cfg.eps);
                constructed.push_back(witness_json(w, verify_witness(w, cfg.eps, 0.0)));
            }
        });
        doc["constructed"] = constructed;
    }
    const auto samples = ctx.sample(static_cast<std::size_t>(cfg.samples));
    const auto result = ctx.timed("witness_search", [&] {
        return witness_search(cfg.f, cfg.dynamics, samples, cfg.m, cfg.eps, delta_min, cfg.max_pairs,
                              ctx.opts.threads);
    });
    doc["search"] = search_json(result, cfg.m, cfg.eps, delta_min);
    doc["sample_count"] = cfg.samples;
    if (result.rejected) {
        ctx.warnings.push_back(std::to_string(result.rejected) + " candidate pairs failed re-verification");
    }
    if (result.pairs_found > result.pairs.size()) {
        ctx.warnings.push_back("witness list truncated to max_pairs = " + std::to_string(cfg.max_pairs));
    }
    ctx.write("witness.json", dump_json(doc));
    ctx.out << result.pairs_found << " witness pairs found, " << result.pairs.size() << " written\n";
    return kExitOk;
}

int cmd_defect(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto samples = ctx.sample(static_cast<std::size_t>(cfg.samples));
    const auto profile = ctx.timed("defect_profile", [&] {
        return defect_profile(cfg.f, cfg.dynamics, cfg.m_values, cfg.eps, samples, ctx.opts.threads);
    });
    CsvWriter csv({"m", "defect", "pairs_found"});
    for (std::size_t i = 0; i < profile.m_values.size(); ++i) {
        csv.cell(profile.m_values[i]).cell(profile.defect[i]);
        csv.cell(static_cast<unsigned long long>(profile.pairs_found[i]));
        csv.end_row();
    }
    ctx.write("defect.csv", csv.str());
    ctx.out << "defect profile over " << profile.m_values.size() << " window lengths\n";
    return kExitOk;
}

int cmd_translate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto& rot = require_rotation(cfg, ctx.command);
    if (!cfg.omega1) throw ConfigError("translate needs `omega1` (the target point)");
    const TorusPoint omega = cfg.omega.value_or(TorusPoint{0});
    const auto steps = ctx.timed("translate_convergence", [&] {
        return translate_convergence(cfg.f, rot, omega, *cfg.omega1, cfg.depth, {cfg.window, cfg.stride});
    });
    CsvWriter csv({"level", "horizon", "n", "distance", "window", "discrepancy", "growing_window",
                   "growing_discrepancy"});
    for (const auto& s : steps) {
        csv.cell(s.level).cell(static_cast<long long>(s.horizon)).cell(static_cast<long long>(s.n));
        csv.cell(s.distance).cell(s.window).cell(s.discrepancy).cell(s.growing_window).cell(s.growing_discrepancy);
        csv.end_row();
    }
    ctx.write("translate.csv", csv.str());
    ctx.out << "final discrepancy " << format_real(steps.back().discrepancy) << "\n";
    return kExitOk;
}

int cmd_reproduce(Context& ctx) {
    const std::uint64_t seed = ctx.require_seed();
    const auto report = ctx.timed("acceptance", [&] { return run_acceptance(seed, ctx.opts.threads, true); });
    for (const auto& [name, bytes] : report.artifacts) ctx.write(name, bytes);
    for (const auto& [op, t] : report.timings) ctx.timings[op] = t;
    for (const auto& c : report.criteria) ctx.out << format_criterion(c) << "\n";
    const bool ok = report.all_passed();
    ctx.out << (ok ? "all criteria PASS" : "some criteria FAIL") << "\n";
    if (!ok) ctx.warnings.push_back("acceptance criteria failed");
    return ok ? kExitOk : kExitFailure;
}

using Handler = std::function<int(Context&)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> table = {
        {"lyapunov", cmd_lyapunov},   {"ids", cmd_ids},         {"thouless-check", cmd_thouless},
        {"spectrum", cmd_spectrum},   {"witness", cmd_witness}, {"defect", cmd_defect},
        {"translate", cmd_translate}, {"reproduce", cmd_reproduce},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, _] : handlers()) n.push_back(name);
        return n;
    }();
    return names;
}

int exit_code_for_current_exception(std::string& message) {
    try {
        throw;
    } catch (const ConfigError& e) {
        message = std::string("config error: ") + e.what();
        return kExitConfig;
    } catch (const NumericError& e) {
        message = std::string("numeric error: ") + e.what();
        return kExitNumeric;
    } catch (const ResourceError& e) {
        message = std::string("resource error: ") + e.what();
        return kExitResource;
    } catch (const std::bad_alloc&) {
        message = "resource error: out of memory";
        return kExitResource;
    } catch (const std::filesystem::filesystem_error& e) {
        message = std::string("resource error: ") + e.what();
        return kExitResource;
    } catch (const std::exception& e) {
        message = std::string("error: ") + e.what();
        return kExitFailure;
    }
}

int run(std::string_view command, const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) {
        err << "unknown command '" << command << "'\n";
        return kExitConfig;
    }
    Context ctx(std::string(command), cfg, opts, out);
    const auto t0 = Clock::now();
    int code = kExitOk;
    std::string message;
    try {
        code = it->second(ctx);
    } catch (...) {
        code = exit_code_for_current_exception(message);
        err << message << "\n";
    }
    const double wall = std::chrono::duration<double>(Clock::now() - t0).count();
    const std::string status = message.empty() ? (code == kExitOk ? "complete" : "criteria-failed") : "failed";
    try {
        ctx.write_manifest(status, message, wall);
    } catch (...) {
        std::string m;
        const int c = exit_code_for_current_exception(m);
        err << m << "\n";
        if (code == kExitOk) code = c;
    }
    return code;
}

}  // namespace ergospec
