// scenarios.hpp — end-to-end runs: config -> atom/modes -> chain -> MPS -> CSV

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cavityqed/atom.hpp"
#include "cavityqed/chainmap.hpp"
#include "cavityqed/config.hpp"
#include "cavityqed/csv.hpp"
#include "cavityqed/hamiltonians.hpp"
#include "cavityqed/modes.hpp"
#include "cavityqed/mps.hpp"
#include "cavityqed/observables.hpp"

#ifndef CAVITYQED_VERSION
#define CAVITYQED_VERSION "0.1.0"
#endif

namespace cavityqed::scenario {

using cfg::RunConfig;
using cfg::Scenario;

inline double cavity_length(Boundary b, double omega_a) {
    return b == Boundary::periodic ? 2.0 * std::numbers::pi / omega_a : std::numbers::pi / omega_a;
}

inline Boundary boundary_of(Scenario s) { return s == Scenario::periodic ? Boundary::periodic : Boundary::pec; }

// Two columns (x/L, eps_r), whitespace or comma separated, '#' comments.
inline std::pair<std::vector<double>, std::vector<double>> load_permittivity(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("permittivity_file: cannot open '" + path + "'");
    std::vector<double> xs, vs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double x, e;
        if (!(row >> x)) continue;
        std::string rest;
        if (!(row >> e) || (row >> rest)) {
            std::ostringstream msg;
            msg << "permittivity_file line " << lineno << ": expected two columns (x/L, eps_r)";
            throw ConfigError(msg.str());
        }
        xs.push_back(x);
        vs.push_back(e);
    }
    return {xs, vs};
}

inline modes::PermittivityProfile make_profile(const RunConfig& c, const SpatialGrid& grid) {
    const double L = grid.length();
    if (!c.permittivity_file.empty()) {
        auto [xs, vs] = load_permittivity(c.permittivity_file);
        for (auto& x : xs) x *= L;
        return modes::PermittivityProfile::from_samples(grid, xs, vs);
    }
    return modes::PermittivityProfile::slab(grid, c.slab_center * L, c.slab_thickness * L, c.slab_permittivity);
}

inline bool uses_numerical_modes(const RunConfig& c, Scenario s) {
    if (s == Scenario::periodic) return false;
    if (cfg::has_slab(s)) return true;
    return !c.permittivity_file.empty();
}

// `count` modes (pairs for the periodic lattice) of the scenario's cavity.
inline modes::ModeBasis make_basis(const RunConfig& c, Scenario s, std::size_t count) {
    const Boundary b = boundary_of(s);
    const double L = cavity_length(b, c.omega_a);
    const SpatialGrid grid(L, static_cast<std::size_t>(c.grid_points), b);
    if (s == Scenario::periodic) return modes::analytic_modes_periodic((count + 1) / 2, c.omega_a, grid);
    if (!uses_numerical_modes(c, s)) return modes::analytic_modes_pec(count, c.omega_a, grid);
    const auto prob = modes::assemble_eigenproblem(make_profile(c, grid), grid, b);
    return modes::solve_modes(prob, count, grid);
}

inline double atom_position(const RunConfig& c, Scenario s, double length) {
    if (c.atom_position != "auto") return cfg::detail::parse_double(c.atom_position) * length;
    return s == Scenario::pec_slab_embedded ? c.slab_center * length : 0.0;
}

struct CavitySetup {
    Scenario scenario;
    modes::ModeBasis basis;
    atom::TwoLevelAtom atom;
    std::vector<std::size_t> selected;  // basis indices of the coupled modes carried by the chain
    modes::Couplings couplings;         // restricted to `selected`
    chain::ChainTransform chain;
};

inline CavitySetup setup_cavity(const RunConfig& c) {
    const Scenario s = c.scenario;
    const auto m = static_cast<std::size_t>(c.mode_count);
    auto basis = make_basis(c, s, c.count_coupled_only ? 2 * m : m);
    const double L = basis.grid().length();
    const double r0 = atom_position(c, s, L);
    const auto at = modes::calibrate_dipole(basis, atom::TwoLevelAtom{c.omega_a, 1.0, r0}, c.coupling);
    const auto all = modes::coupling_coefficients(basis, at);
    std::vector<std::size_t> sel;
    for (std::size_t k = 0; k < all.size() && (!c.count_coupled_only || sel.size() < m); ++k)
        if (all.coupled[k]) sel.push_back(k);
    if (c.count_coupled_only && sel.size() < m) {
        std::ostringstream msg;
        msg << "only " << sel.size() << " of the requested " << m << " coupled modes exist at this atom position";
        throw ConfigError(msg.str());
    }
    auto sub = all.subset(sel);
    auto ch = chain::chain_map(sub.omega, sub.g_d, true);
    return CavitySetup{s, std::move(basis), at, std::move(sel), std::move(sub), std::move(ch)};
}

struct DynamicResult {
    std::vector<double> times;       // t/T at each sample
    std::vector<double> population;  // <sigma+ sigma->
    std::vector<VectorXd> photons;   // raw <a_k^+ a_k> over the selected modes
    std::vector<VectorXd> field;     // G1 at `positions`
    std::vector<double> positions;   // x/L
    std::vector<double> mode_omega;  // selected mode frequencies
    struct Diag {
        std::size_t step;
        double time;
        double norm;
        std::size_t max_bond;
        double discarded;
    };
    std::vector<Diag> diagnostics;
};

inline mps::TruncationPolicy policy_of(const RunConfig& c) {
    mps::TruncationPolicy p;
    p.max_bond = static_cast<std::size_t>(c.bond_cap);
    p.svd_cutoff = c.svd_cutoff;
    p.use_gram = c.svd_method == "gram";
    p.use_randomized_svd = c.svd_method == "randomized";
    p.seed = c.seed;
    p.validate();
    return p;
}

using Progress = std::function<void(std::size_t step, std::size_t total)>;

inline DynamicResult run_dynamics(const CavitySetup& setup, const RunConfig& c, const Progress& progress = {}) {
    const double period = 2.0 * std::numbers::pi / c.omega_a;
    const double dt = c.dt_over_T * period;
    const auto steps = static_cast<std::size_t>(std::llround(c.total_periods / c.dt_over_T));
    const auto n = static_cast<std::size_t>(c.photon_cutoff);
    const auto every = static_cast<std::size_t>(c.sample_every);
    const auto policy = policy_of(c);
    std::mt19937_64 rng(c.seed);
    const auto gates = mps::build_gates(setup.atom, setup.chain, dt, n, c.trotter_order == 2);
    auto state = mps::product_state(true, setup.chain.length(), n);

    DynamicResult r;
    const double L = setup.basis.grid().length();
    const auto xs = obs::uniform_positions(L, static_cast<std::size_t>(c.field_positions));
    for (double x : xs) r.positions.push_back(x / L);
    r.mode_omega = setup.couplings.omega;

    auto sample = [&](std::size_t step) {
        const MatrixXcd b = mps::correlation_matrix(state);
        r.times.push_back(static_cast<double>(step) * c.dt_over_T);
        r.population.push_back(mps::excited_population(state));
        r.photons.push_back(obs::photon_numbers(b, setup.chain.U));
        r.field.push_back(obs::field_correlation(b, setup.chain.U, setup.basis, setup.selected, xs));
    };
    double discarded = 0.0;
    r.diagnostics.push_back({0, 0.0, state.norm(), state.max_bond(), 0.0});
    sample(0);
    for (std::size_t s = 1; s <= steps; ++s) {
        discarded += mps::tebd_step(state, gates, policy, &rng).total();
        r.diagnostics.push_back({s, static_cast<double>(s) * c.dt_over_T, state.norm(), state.max_bond(), discarded});
        if (s % every == 0) sample(s);
        if (progress) progress(s, steps);
    }
    return r;
}

struct SpectraPoint {
    double g{0.0};
    std::string variant;
    std::size_t cutoff{0};
    bool converged{false};
    VectorXd gaps;
};

// Gap sweep over the homogeneous PEC cavity with the atom at the centre.
inline std::vector<SpectraPoint> run_spectra(const RunConfig& c, unsigned jobs = 1) {
    const auto m = static_cast<std::size_t>(c.spectra_mode_count);
    const SpatialGrid grid(cavity_length(Boundary::pec, c.omega_a), static_cast<std::size_t>(c.grid_points), Boundary::pec);
    const auto basis = modes::analytic_modes_pec(m, c.omega_a, grid);
    const double r0 = c.atom_position == "auto" ? 0.0 : cfg::detail::parse_double(c.atom_position) * grid.length();
    const auto variants = cfg::split_list(c.spectra_variants);
    const bool need_atom = std::any_of(variants.begin(), variants.end(), [](const std::string& v) {
        return v == "full_C" || v == "full_D" || v == "rabi_D_direct";
    });
    const auto levels = static_cast<std::size_t>(c.atom_levels);
    std::optional<atom::AtomSpectrum> spec;
    if (need_atom) spec = atom::default_double_well_spectrum(c.anharmonicity, levels);

    std::vector<double> gs;
    for (int i = 0; i < c.sweep_points; ++i)
        gs.push_back(c.sweep_points == 1 ? c.sweep_min
                                         : c.sweep_min + (c.sweep_max - c.sweep_min) * i / (c.sweep_points - 1));
    const auto nlev = static_cast<std::size_t>(c.spectra_levels);
    ham::BuildOptions opt;
    opt.max_dim = static_cast<std::size_t>(c.max_dense_dim);

    const auto unit = modes::coupling_coefficients(basis, atom::TwoLevelAtom{c.omega_a, 1.0, r0});
    const auto coupled = unit.coupled_indices();
    if (coupled.empty()) throw ConfigError("no mode couples at the atom position");
    const double w1 = unit.omega[coupled.front()];

    auto point = [&](double g) {
        const double target = c.sweep_coupling == "C" ? g * w1 / c.omega_a : g;
        const auto at = modes::calibrate_dipole(basis, atom::TwoLevelAtom{c.omega_a, 1.0, r0}, target);
        const auto cp = modes::coupling_coefficients(basis, at);
        std::vector<SpectraPoint> out;
        for (const auto& name : variants) {
            const auto v = ham::variant_from_string(name);
            SpectraPoint p{g, name, 0, true, {}};
            if (v == ham::Variant::full_C || v == ham::Variant::full_D) {
                const FockTruncation tr{m, static_cast<std::size_t>(c.full_photon_cutoff), std::nullopt};
                const auto h = v == ham::Variant::full_C ? ham::build_full_coulomb(*spec, cp, tr, levels, opt)
                                                        : ham::build_full_dipole(*spec, cp, tr, levels, opt);
                p.cutoff = tr.cutoff;
                p.converged = false;
                p.gaps = ham::spectrum_gaps(h, nlev);
                out.push_back(p);
                continue;
            }
            auto build = [&](std::size_t n) -> ham::DenseHamiltonian {
                const FockTruncation tr{m, n, std::nullopt};
                switch (v) {
                    case ham::Variant::rabi_C_direct: return ham::build_rabi_coulomb_direct(cp, tr, opt);
                    case ham::Variant::rabi_D_direct: return ham::build_rabi_dipole_direct(*spec, cp, tr, levels, opt);
                    case ham::Variant::rabi_C_proper: return ham::build_rabi_coulomb_proper(cp, tr, opt);
                    default: return ham::build_rabi_dipole_proper(cp, tr, opt);
                }
            };
            std::function<ham::DenseHamiltonian(std::size_t)> builder = build;
            if (v == ham::Variant::chain) {
                builder = [&, build](std::size_t n) {
                    const auto idx = cp.coupled_indices();
                    // every coupling vanishes at g = 0, where the chain is the bare star
                    if (idx.empty()) return build(n);
                    const auto sub = cp.subset(idx);
                    const auto ch = chain::chain_map(sub.omega, sub.g_d);
                    auto h = ham::build_chain_dense(at, ch, {ch.length(), n, std::nullopt}, opt);
                    for (std::size_t k = 0; k < cp.size(); ++k)
                        if (!cp.coupled[k]) h.spectators.push_back(cp.omega[k]);
                    h.omega_ref = *std::min_element(cp.omega.begin(), cp.omega.end());
                    return h;
                };
            }
            const auto res = ham::converge_cutoff(builder, nlev, static_cast<std::size_t>(c.cutoff_start),
                                                  static_cast<std::size_t>(c.cutoff_step),
                                                  static_cast<std::size_t>(c.cutoff_max), c.cutoff_tol);
            p.cutoff = res.cutoff;
            p.converged = res.converged;
            p.gaps = res.gaps;
            out.push_back(p);
        }
        return out;
    };

    std::vector<std::vector<SpectraPoint>> per(gs.size());
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < gs.size();) {
            try {
                per[i] = point(gs[i]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(gs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    std::vector<SpectraPoint> out;
    for (auto& v : per) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Linear spectrum w_k = k w_a, k = 1..M_c, with g_k ~ sqrt(w_k) (centre of
// the periodic lattice), scaled so g_1 / w_1 = coupling.
inline std::pair<std::vector<double>, std::vector<double>> linear_chain_input(std::size_t count, double omega_a,
                                                                              double coupling) {
    std::vector<double> w, g;
    for (std::size_t k = 1; k <= count; ++k) {
        w.push_back(static_cast<double>(k) * omega_a);
        g.push_back(coupling * omega_a * std::sqrt(static_cast<double>(k)));
    }
    return {w, g};
}

struct CouplingProfile {
    std::vector<double> omega;
    std::vector<double> adjacent;  // |g_D,k / w_k|
    std::vector<double> embedded;
};

inline CouplingProfile coupling_profile(const RunConfig& c) {
    const auto basis = make_basis(c, Scenario::coupling_profile, static_cast<std::size_t>(c.mode_count));
    const double L = basis.grid().length();
    auto ratios = [&](double r0) {
        const auto at = modes::calibrate_dipole(basis, atom::TwoLevelAtom{c.omega_a, 1.0, r0}, c.coupling);
        const auto cp = modes::coupling_coefficients(basis, at);
        std::vector<double> out;
        for (std::size_t k = 0; k < cp.size(); ++k) out.push_back(std::abs(cp.g_d[k] / cp.omega[k]));
        return out;
    };
    const double adj = c.atom_position == "auto" ? 0.0 : cfg::detail::parse_double(c.atom_position) * L;
    return CouplingProfile{basis.frequencies(), ratios(adj), ratios(c.slab_center * L)};
}

struct ManifestEntry {
    std::string file;
    std::string kind;
    std::size_t rows;
};

struct OutputBundle {
    std::filesystem::path directory;
    std::vector<ManifestEntry> files;
    std::string config_hash;
    double wall_time{0.0};
    std::string version{CAVITYQED_VERSION};
};

namespace detail {

inline std::string meta(const RunConfig& c, const std::string& what) {
    return what + "; scenario=" + cfg::to_string(c.scenario) + "; config_hash=" + cfg::config_hash(c) +
           "; cavityqed " + CAVITYQED_VERSION;
}

inline void finish(csv::Writer& w, const std::string& kind, OutputBundle& b) {
    w.close();
    b.files.push_back({w.path().filename().string(), kind, w.rows()});
}

inline void write_dynamic(const RunConfig& c, const CavitySetup& setup, const DynamicResult& r, OutputBundle& b) {
    const auto& dir = b.directory;
    {
        csv::Writer w(dir / "population.csv", meta(c, "pop = <sigma+ sigma->; time in units of T = 2 pi / omega_a"),
                      {"time_over_T", "pop"});
        for (std::size_t i = 0; i < r.times.size(); ++i) w.row(r.times[i], r.population[i]);
        finish(w, "population", b);
    }
    for (const bool raw : {false, true}) {
        csv::Writer w(dir / (raw ? "photons_raw.csv" : "photons.csv"),
                      meta(c, std::string("n_k = <a_k^+ a_k> over coupled modes, k = 1-based basis index") +
                                  (raw ? ", unclipped" : ", values below zero clipped to 0")),
                      {"time_over_T", "k", "omega_k_over_wa", "n_k"});
        for (std::size_t i = 0; i < r.times.size(); ++i)
            for (std::size_t j = 0; j < setup.selected.size(); ++j) {
                const double n = r.photons[i](static_cast<Eigen::Index>(j));
                w.row(r.times[i], setup.selected[j] + 1, r.mode_omega[j] / c.omega_a, raw ? n : std::max(0.0, n));
            }
        finish(w, raw ? "photons_raw" : "photons", b);
    }
    {
        std::string what = "g1 = (1/2L) sum_kk' sqrt(w_k w_k') A_k(x) A_k'(x) <a_k^+ a_k'> (prefactor hbar/(2 eps0 L) "
                           "with hbar = eps0 = 1); x in units of L";
        if (cfg::has_slab(c.scenario) && c.permittivity_file.empty()) {
            what += "; slab_x_over_L=" + csv::num(c.slab_center - 0.5 * c.slab_thickness) + ":" +
                    csv::num(c.slab_center + 0.5 * c.slab_thickness);
        }
        csv::Writer w(dir / "fieldmap.csv", meta(c, what), {"time_over_T", "x_over_L", "g1"});
        for (std::size_t i = 0; i < r.times.size(); ++i)
            for (std::size_t j = 0; j < r.positions.size(); ++j)
                w.row(r.times[i], r.positions[j], r.field[i](static_cast<Eigen::Index>(j)));
        finish(w, "fieldmap", b);
    }
    {
        csv::Writer w(dir / "diagnostics.csv",
                      meta(c, "norm = sqrt<psi|psi>; total_discarded_weight accumulated over all bond truncations"),
                      {"step", "time_over_T", "norm", "max_bond", "total_discarded_weight"});
        for (const auto& d : r.diagnostics) w.row(d.step, d.time, d.norm, d.max_bond, d.discarded);
        finish(w, "diagnostics", b);
    }
}

inline void write_chain(const std::filesystem::path& path, const std::string& comment, const chain::ChainTransform& ch,
                        double omega_a, const std::string& kind, OutputBundle& b) {
    csv::Writer w(path, comment, {"n", "xi_over_wa", "t_over_wa", "orthogonality_defect"});
    for (std::size_t n = 0; n < ch.length(); ++n)
        w.row(n + 1, ch.xi[n] / omega_a, n < ch.t.size() ? ch.t[n] / omega_a : 0.0, ch.defect[n]);
    finish(w, kind, b);
}

}  // namespace detail

// Runs the configured scenario and writes its files into `dir`.
inline OutputBundle run_scenario(const RunConfig& c, const std::filesystem::path& dir, unsigned jobs = 1,
                                 const Progress& progress = {}) {
    cfg::require_valid(c);
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(dir);
    OutputBundle b;
    b.directory = dir;
    b.config_hash = cfg::config_hash(c);

    switch (c.scenario) {
        case Scenario::periodic:
        case Scenario::pec_homogeneous:
        case Scenario::pec_slab_adjacent:
        case Scenario::pec_slab_embedded: {
            if (!(c.coupling > 0.0)) throw ConfigError("coupling must be positive for dynamic scenarios");
            const auto setup = setup_cavity(c);
            const auto r = run_dynamics(setup, c, progress);
            detail::write_dynamic(c, setup, r, b);
            break;
        }
        case Scenario::spectra_sweep: {
            const auto pts = run_spectra(c, jobs);
            {
                csv::Writer w(dir / "spectra.csv",
                              detail::meta(c, "gap = (E_i - E_0) / (hbar w_1); g_over_w1 is g_" + c.sweep_coupling +
                                                  ",1 / w_1"),
                              {"g_over_w1", "variant", "level_index", "gap"});
                for (const auto& p : pts)
                    for (Eigen::Index i = 0; i < p.gaps.size(); ++i) w.row(p.g, p.variant, i, p.gaps(i));
                detail::finish(w, "spectra", b);
            }
            {
                csv::Writer w(dir / "spectra_cutoffs.csv",
                              detail::meta(c, "photon cutoff used per sweep point; converged = gaps moved < cutoff_tol"),
                              {"g_over_w1", "variant", "photon_cutoff", "converged"});
                for (const auto& p : pts) w.row(p.g, p.variant, p.cutoff, p.converged ? 1 : 0);
                detail::finish(w, "spectra_cutoffs", b);
            }
            break;
        }
        case Scenario::chainmap_diagnostic: {
            const auto [w, g] = linear_chain_input(static_cast<std::size_t>(c.chain_modes), c.omega_a, c.coupling);
            const std::string what = "w_k = k w_a, g_k ~ sqrt(w_k); orthogonality_defect = max_m<=n |<u_n,u_m> - delta|";
            detail::write_chain(dir / "chainmap_stabilized.csv", detail::meta(c, what), chain::chain_map(w, g, true),
                                c.omega_a, "chainmap_stabilized", b);
            detail::write_chain(dir / "chainmap_naive.csv", detail::meta(c, what), chain::naive_chain_map(w, g),
                                c.omega_a, "chainmap_naive", b);
            break;
        }
        case Scenario::coupling_profile: {
            const auto p = coupling_profile(c);
            csv::Writer w(dir / "couplings.csv",
                          detail::meta(c, "|g_D,k / w_k|, each placement calibrated to g_D,1 / w_1 = " +
                                              csv::num(c.coupling)),
                          {"k", "omega_k_over_wa", "g_over_omega_adjacent", "g_over_omega_embedded"});
            for (std::size_t k = 0; k < p.omega.size(); ++k)
                w.row(k + 1, p.omega[k] / c.omega_a, p.adjacent[k], p.embedded[k]);
            detail::finish(w, "couplings", b);
            break;
        }
    }

    {
        const std::string echo = cfg::emit_config(c);
        std::ofstream out(dir / "config_echo.cfg");
        out << "# config_hash=" << b.config_hash << "\n" << echo;
        if (!out) throw Error("failed writing config_echo.cfg");
        b.files.push_back({"config_echo.cfg", "config", static_cast<std::size_t>(std::count(echo.begin(), echo.end(), '\n'))});
    }
    b.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    {
        std::ostringstream comment;
        comment << "cavityqed " << b.version << "; config_hash=" << b.config_hash << "; wall_time_s=" << b.wall_time;
        csv::Writer w(dir / "manifest.csv", comment.str(), {"file", "kind", "rows"});
        for (const auto& f : b.files) w.row(f.file, f.kind, f.rows);
        w.close();
    }
    return b;
}

}  // namespace cavityqed::scenario
