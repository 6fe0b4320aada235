// config.hpp — flat key = value run configuration
//
// One setting per line, '#' starts a comment, blank lines are ignored.
// Unknown keys are rejected. Every key has a default, so an empty file is
// a valid periodic run.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cavityqed/errors.hpp"

namespace cavityqed::cfg {

enum class Scenario {
    periodic,
    pec_homogeneous,
    pec_slab_adjacent,
    pec_slab_embedded,
    spectra_sweep,
    chainmap_diagnostic,
    coupling_profile
};

inline const std::vector<std::pair<Scenario, std::string>>& scenario_names() {
    static const std::vector<std::pair<Scenario, std::string>> names = {
        {Scenario::periodic, "periodic"},
        {Scenario::pec_homogeneous, "pec_homogeneous"},
        {Scenario::pec_slab_adjacent, "pec_slab_adjacent"},
        {Scenario::pec_slab_embedded, "pec_slab_embedded"},
        {Scenario::spectra_sweep, "spectra_sweep"},
        {Scenario::chainmap_diagnostic, "chainmap_diagnostic"},
        {Scenario::coupling_profile, "coupling_profile"},
    };
    return names;
}

inline std::string to_string(Scenario s) {
    for (const auto& [v, n] : scenario_names())
        if (v == s) return n;
    return "?";
}

inline bool is_dynamic(Scenario s) {
    return s == Scenario::periodic || s == Scenario::pec_homogeneous || s == Scenario::pec_slab_adjacent ||
           s == Scenario::pec_slab_embedded;
}

inline bool has_slab(Scenario s) {
    return s == Scenario::pec_slab_adjacent || s == Scenario::pec_slab_embedded || s == Scenario::coupling_profile;
}

struct RunConfig {
    Scenario scenario{Scenario::periodic};

    // dynamics
    int mode_count{20};              // coupled modes when count_coupled_only, else all modes
    bool count_coupled_only{true};
    int photon_cutoff{6};
    int bond_cap{32};
    double svd_cutoff{1e-10};
    std::string svd_method{"gram"};  // gram | direct | randomized
    int trotter_order{1};
    double dt_over_T{1e-3};
    double total_periods{3.0};
    int sample_every{10};
    int field_positions{201};
    std::string atom_position{"auto"};  // r0/L or auto
    double coupling{0.6};               // g_D,1 / w_1 on the lowest coupled mode
    double omega_a{1.0};

    // numerical modes
    int grid_points{1001};
    double slab_center{-0.25};     // units of L
    double slab_thickness{0.125};  // units of L
    double slab_permittivity{4.0};
    std::string permittivity_file{};

    // spectra
    int spectra_mode_count{5};
    std::string spectra_variants{"full_C,full_D,rabi_C_direct,rabi_D_direct,rabi_C_proper,rabi_D_proper"};
    std::string sweep_coupling{"C"};  // which coupling the sweep axis fixes: C or D
    double sweep_min{0.0};
    double sweep_max{1.0};
    int sweep_points{11};
    int spectra_levels{8};
    int cutoff_start{6};
    int cutoff_step{2};
    int cutoff_max{12};
    double cutoff_tol{1e-6};
    int atom_levels{40};
    int full_photon_cutoff{4};
    double anharmonicity{500.0};
    int max_dense_dim{6000};

    // chain-map diagnostic
    int chain_modes{100};

    std::uint64_t seed{0};
    std::string output_dir{"out"};
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Shortest text that parses back to the same double.
inline std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end || !std::isfinite(v)) throw ConfigError("expected a number, got '" + s + "'");
    return v;
}

inline long long parse_int(const std::string& s) {
    long long v = 0;
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) throw ConfigError("expected an integer, got '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define CAVITYQED_INT_KEY(field)                                                                      \
    Key {                                                                                             \
        #field, [](RunConfig& c, const std::string& v) { c.field = static_cast<int>(parse_int(v)); }, \
            [](const RunConfig& c) { return std::to_string(c.field); }                               \
    }
#define CAVITYQED_DOUBLE_KEY(field)                                                        \
    Key {                                                                                  \
        #field, [](RunConfig& c, const std::string& v) { c.field = parse_double(v); },     \
            [](const RunConfig& c) { return fmt_double(c.field); }                         \
    }
#define CAVITYQED_STRING_KEY(field)                                               \
    Key {                                                                         \
        #field, [](RunConfig& c, const std::string& v) { c.field = v; },          \
            [](const RunConfig& c) { return c.field; }                            \
    }

inline const std::vector<Key>& keys() {
    static const std::vector<Key> k = {
        Key{"scenario",
            [](RunConfig& c, const std::string& v) {
                for (const auto& [s, n] : scenario_names())
                    if (n == v) {
                        c.scenario = s;
                        return;
                    }
                throw ConfigError("unknown scenario '" + v + "'");
            },
            [](const RunConfig& c) { return to_string(c.scenario); }},
        CAVITYQED_INT_KEY(mode_count),
        Key{"count_coupled_only", [](RunConfig& c, const std::string& v) { c.count_coupled_only = parse_bool(v); },
            [](const RunConfig& c) { return std::string(c.count_coupled_only ? "true" : "false"); }},
        CAVITYQED_INT_KEY(photon_cutoff),
        CAVITYQED_INT_KEY(bond_cap),
        CAVITYQED_DOUBLE_KEY(svd_cutoff),
        CAVITYQED_STRING_KEY(svd_method),
        CAVITYQED_INT_KEY(trotter_order),
        CAVITYQED_DOUBLE_KEY(dt_over_T),
        CAVITYQED_DOUBLE_KEY(total_periods),
        CAVITYQED_INT_KEY(sample_every),
        CAVITYQED_INT_KEY(field_positions),
        CAVITYQED_STRING_KEY(atom_position),
        CAVITYQED_DOUBLE_KEY(coupling),
        CAVITYQED_DOUBLE_KEY(omega_a),
        CAVITYQED_INT_KEY(grid_points),
        CAVITYQED_DOUBLE_KEY(slab_center),
        CAVITYQED_DOUBLE_KEY(slab_thickness),
        CAVITYQED_DOUBLE_KEY(slab_permittivity),
        CAVITYQED_STRING_KEY(permittivity_file),
        CAVITYQED_INT_KEY(spectra_mode_count),
        CAVITYQED_STRING_KEY(spectra_variants),
        CAVITYQED_STRING_KEY(sweep_coupling),
        CAVITYQED_DOUBLE_KEY(sweep_min),
        CAVITYQED_DOUBLE_KEY(sweep_max),
        CAVITYQED_INT_KEY(sweep_points),
        CAVITYQED_INT_KEY(spectra_levels),
        CAVITYQED_INT_KEY(cutoff_start),
        CAVITYQED_INT_KEY(cutoff_step),
        CAVITYQED_INT_KEY(cutoff_max),
        CAVITYQED_DOUBLE_KEY(cutoff_tol),
        CAVITYQED_INT_KEY(atom_levels),
        CAVITYQED_INT_KEY(full_photon_cutoff),
        CAVITYQED_DOUBLE_KEY(anharmonicity),
        CAVITYQED_INT_KEY(max_dense_dim),
        CAVITYQED_INT_KEY(chain_modes),
        Key{"seed",
            [](RunConfig& c, const std::string& v) {
                const long long s = parse_int(v);
                if (s < 0) throw ConfigError("seed must be non-negative");
                c.seed = static_cast<std::uint64_t>(s);
            },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
        CAVITYQED_STRING_KEY(output_dir),
    };
    return k;
}

#undef CAVITYQED_INT_KEY
#undef CAVITYQED_DOUBLE_KEY
#undef CAVITYQED_STRING_KEY

inline const Key* find_key(const std::string& name) {
    for (const auto& k : keys())
        if (k.name == name) return &k;
    return nullptr;
}

}  // namespace detail

inline std::vector<std::string> key_names() {
    std::vector<std::string> out;
    for (const auto& k : detail::keys()) out.push_back(k.name);
    return out;
}

// Sets one key; throws ConfigError naming the key on a bad value.
inline void set_value(RunConfig& c, const std::string& key, const std::string& value) {
    const auto* k = detail::find_key(key);
    if (!k) throw ConfigError("unknown key '" + key + "'");
    try {
        k->set(c, value);
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

inline std::string get_value(const RunConfig& c, const std::string& key) {
    const auto* k = detail::find_key(key);
    if (!k) throw ConfigError("unknown key '" + key + "'");
    return k->get(c);
}

// "key=value" as given on the command line.
inline void apply_override(RunConfig& c, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + kv + "' is not of the form key=value");
    set_value(c, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::istringstream in(text);
    std::string line;
    std::map<std::string, int> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        std::ostringstream where;
        where << "line " << lineno << ": ";
        if (eq == std::string::npos) throw ConfigError(where.str() + "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where.str() + "missing key");
        if (auto it = seen.find(key); it != seen.end()) {
            std::ostringstream msg;
            msg << where.str() << "duplicate key '" << key << "' (first set on line " << it->second << ")";
            throw ConfigError(msg.str());
        }
        seen[key] = lineno;
        try {
            set_value(c, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where.str() + e.what());
        }
    }
    return c;
}

// Every key in declaration order; parse_config(emit_config(c)) == c.
inline std::string emit_config(const RunConfig& c) {
    std::ostringstream out;
    for (const auto& k : detail::keys()) out << k.name << " = " << k.get(c) << "\n";
    return out.str();
}

inline bool operator==(const RunConfig& a, const RunConfig& b) { return emit_config(a) == emit_config(b); }

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = detail::trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Every violated constraint, one message per field.
inline std::vector<std::string> validate_config(const RunConfig& c) {
    std::vector<std::string> v;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) v.push_back(msg);
    };
    need(c.mode_count >= 1, "mode_count must be >= 1");
    need(c.photon_cutoff >= 2, "photon_cutoff must be >= 2");
    need(c.bond_cap >= 1, "bond_cap must be >= 1");
    need(c.svd_cutoff >= 0.0 && c.svd_cutoff < 1.0, "svd_cutoff must lie in [0, 1)");
    need(c.svd_method == "gram" || c.svd_method == "direct" || c.svd_method == "randomized",
         "svd_method must be gram, direct or randomized");
    need(c.trotter_order == 1 || c.trotter_order == 2, "trotter_order must be 1 or 2");
    need(c.dt_over_T > 0.0 && c.dt_over_T <= 0.1, "dt_over_T must lie in (0, 0.1]");
    need(c.total_periods > 0.0, "total_periods must be positive");
    need(c.sample_every >= 1, "sample_every must be >= 1");
    need(c.field_positions >= 2, "field_positions must be >= 2");
    if (c.atom_position != "auto") {
        try {
            const double r = detail::parse_double(c.atom_position);
            need(r >= -0.5 && r <= 0.5, "atom_position must lie in [-0.5, 0.5] (units of L) or be auto");
        } catch (const ConfigError&) {
            v.push_back("atom_position must be a number or auto");
        }
    }
    need(c.coupling >= 0.0, "coupling must be non-negative");
    need(c.omega_a > 0.0, "omega_a must be positive");
    need(c.grid_points >= 3, "grid_points must be >= 3");
    need(c.grid_points > 2 * c.mode_count + 2, "grid_points must exceed 2 * mode_count + 2");
    need(c.slab_center >= -0.5 && c.slab_center <= 0.5, "slab_center must lie in [-0.5, 0.5] (units of L)");
    need(c.slab_thickness > 0.0 && c.slab_thickness <= 1.0, "slab_thickness must lie in (0, 1] (units of L)");
    need(c.slab_permittivity >= 1.0, "slab_permittivity must be >= 1");
    need(c.spectra_mode_count >= 1, "spectra_mode_count must be >= 1");
    {
        static const std::vector<std::string> ok = {"full_C",        "full_D",        "rabi_C_direct", "rabi_D_direct",
                                                    "rabi_C_proper", "rabi_D_proper", "chain"};
        const auto vars = split_list(c.spectra_variants);
        need(!vars.empty(), "spectra_variants must list at least one variant");
        for (const auto& s : vars)
            need(std::find(ok.begin(), ok.end(), s) != ok.end(), "spectra_variants: unknown variant '" + s + "'");
    }
    need(c.sweep_coupling == "C" || c.sweep_coupling == "D", "sweep_coupling must be C or D");
    need(c.sweep_min >= 0.0, "sweep_min must be non-negative");
    need(c.sweep_max >= c.sweep_min, "sweep_max must be >= sweep_min");
    need(c.sweep_points >= 1, "sweep_points must be >= 1");
    need(c.spectra_levels >= 2, "spectra_levels must be >= 2");
    need(c.cutoff_start >= 2, "cutoff_start must be >= 2");
    need(c.cutoff_step >= 1, "cutoff_step must be >= 1");
    need(c.cutoff_max >= c.cutoff_start, "cutoff_max must be >= cutoff_start");
    need(c.cutoff_tol > 0.0, "cutoff_tol must be positive");
    need(c.atom_levels >= 10, "atom_levels must be >= 10");
    need(c.full_photon_cutoff >= 2, "full_photon_cutoff must be >= 2");
    need(c.anharmonicity > 1.0, "anharmonicity must exceed 1");
    need(c.max_dense_dim >= 4, "max_dense_dim must be >= 4");
    need(c.chain_modes >= 1, "chain_modes must be >= 1");
    need(!c.output_dir.empty(), "output_dir must not be empty");
    return v;
}

inline void require_valid(const RunConfig& c) {
    const auto v = validate_config(c);
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "invalid configuration:";
    for (const auto& s : v) msg << "\n  " << s;
    throw ConfigError(msg.str());
}

// FNV-1a 64 over the canonical emitted text, output_dir excluded.
inline std::string config_hash(const RunConfig& c) {
    RunConfig copy = c;
    copy.output_dir.clear();
    const std::string text = emit_config(copy);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream o;
    o << std::hex << std::setw(16) << std::setfill('0') << h;
    return o.str();
}

}  // namespace cavityqed::cfg
