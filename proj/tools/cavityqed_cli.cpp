// cavityqed command line: run | spectra | chainmap | couplings | validate

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cavityqed/cavityqed.hpp"

namespace {

using namespace cavityqed;

enum Exit { ok = 0, usage = 1, config_error = 2, numeric_error = 3, other_error = 4 };

struct Options {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    unsigned jobs{std::max(1u, std::thread::hardware_concurrency())};
    bool quiet{false};
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
    sub->add_option("--override", o.overrides, "key=value, repeatable")->allow_extra_args(false);
    sub->add_option("--jobs", o.jobs, "worker threads for independent sweep points")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", o.quiet, "no progress output");
}

cfg::RunConfig load(const Options& o) {
    cfg::RunConfig c;
    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw ConfigError("cannot read " + o.config);
        std::ostringstream text;
        text << in.rdbuf();
        c = cfg::parse_config(text.str());
    }
    for (const auto& kv : o.overrides) cfg::apply_override(c, kv);
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

int run(cfg::RunConfig c, const Options& o, std::optional<cfg::Scenario> force) {
    if (force) c.scenario = *force;
    scenario::Progress progress;
    std::size_t last = 0;
    if (!o.quiet && cfg::is_dynamic(c.scenario)) {
        progress = [&last](std::size_t s, std::size_t total) {
            const std::size_t pct = 100 * s / total;
            if (pct >= last + 5 || s == total) {
                last = pct;
                std::cerr << "\rstep " << s << "/" << total << " (" << pct << "%)" << (s == total ? "\n" : "")
                          << std::flush;
            }
        };
    }
    const auto b = scenario::run_scenario(c, c.output_dir, o.jobs, progress);
    if (!o.quiet) {
        std::cout << cfg::to_string(c.scenario) << " -> " << b.directory.string() << " (" << b.wall_time << " s, hash "
                  << b.config_hash << ")\n";
        for (const auto& f : b.files) std::cout << "  " << f.file << " (" << f.rows << " rows)\n";
    }
    return ok;
}

int validate(const cfg::RunConfig& c) {
    const auto report = cfg::validate_config(c);
    if (report.empty()) {
        std::cout << "valid (config_hash " << cfg::config_hash(c) << ")\n";
        return ok;
    }
    for (const auto& m : report) std::cerr << "invalid: " << m << "\n";
    return config_error;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gauge-invariant cavity QED simulator"};
    app.set_version_flag("--version", std::string("cavityqed ") + CAVITYQED_VERSION);
    app.require_subcommand(1);
    Options o;
    auto* run_cmd = app.add_subcommand("run", "run the scenario named in the config");
    auto* spectra_cmd = app.add_subcommand("spectra", "gap sweep over Hamiltonian variants");
    auto* chain_cmd = app.add_subcommand("chainmap", "chain-map coefficients and orthogonality defects");
    auto* coup_cmd = app.add_subcommand("couplings", "|g_D,k / w_k| for adjacent and embedded slab placements");
    auto* val_cmd = app.add_subcommand("validate", "parse and validate a config, print every violation");
    for (auto* s : {run_cmd, spectra_cmd, chain_cmd, coup_cmd, val_cmd}) add_common(s, o);
    auto* dump_cmd = app.add_subcommand("defaults", "print the default config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        if (dump_cmd->parsed()) {
            std::cout << cfg::emit_config(cfg::RunConfig{});
            return ok;
        }
        const auto c = load(o);
        if (val_cmd->parsed()) return validate(c);
        if (spectra_cmd->parsed()) return run(c, o, cfg::Scenario::spectra_sweep);
        if (chain_cmd->parsed()) return run(c, o, cfg::Scenario::chainmap_diagnostic);
        if (coup_cmd->parsed()) return run(c, o, cfg::Scenario::coupling_profile);
        return run(c, o, std::nullopt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return numeric_error;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return numeric_error;
    } catch (const DimensionError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return numeric_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return other_error;
    }
}
