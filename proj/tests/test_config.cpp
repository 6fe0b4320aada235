#include <gtest/gtest.h>

#include <string>

#include "cavityqed/config.hpp"

using namespace cavityqed;
using namespace cavityqed::cfg;

namespace {

bool mentions(const std::vector<std::string>& report, const std::string& field) {
    for (const auto& m : report)
        if (m.find(field) != std::string::npos) return true;
    return false;
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, EmptyFileGivesValidDefaults) {
    const auto c = parse_config("");
    EXPECT_TRUE(c == RunConfig{});
    EXPECT_TRUE(validate_config(c).empty());
    EXPECT_EQ(c.scenario, Scenario::periodic);
    EXPECT_EQ(c.mode_count, 20);
    EXPECT_EQ(c.photon_cutoff, 6);
    EXPECT_EQ(c.bond_cap, 32);
    EXPECT_DOUBLE_EQ(c.svd_cutoff, 1e-10);
    EXPECT_DOUBLE_EQ(c.dt_over_T, 1e-3);
    EXPECT_DOUBLE_EQ(c.total_periods, 3.0);
    EXPECT_DOUBLE_EQ(c.coupling, 0.6);
    EXPECT_EQ(c.spectra_mode_count, 5);
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config("# header\n\n  scenario = pec_slab_embedded  # trailing\nphoton_cutoff=4\r\n");
    EXPECT_EQ(c.scenario, Scenario::pec_slab_embedded);
    EXPECT_EQ(c.photon_cutoff, 4);
}

TEST(Config, ZeroPhotonCutoffFailsValidationNamingTheField) {
    const auto c = parse_config("photon_cutoff = 0\n");
    const auto report = validate_config(c);
    ASSERT_FALSE(report.empty());
    EXPECT_TRUE(mentions(report, "photon_cutoff"));
    EXPECT_THROW(require_valid(c), ConfigError);
}

TEST(Config, ReportListsEveryViolation) {
    const auto c = parse_config("photon_cutoff = 1\nbond_cap = 0\ndt_over_T = -1\nsvd_method = magic\n");
    const auto report = validate_config(c);
    EXPECT_EQ(report.size(), 4u);
    for (const char* f : {"photon_cutoff", "bond_cap", "dt_over_T", "svd_method"}) EXPECT_TRUE(mentions(report, f)) << f;
}

TEST(Config, RoundTrip) {
    RunConfig c;
    EXPECT_TRUE(parse_config(emit_config(c)) == c);
    c.scenario = Scenario::spectra_sweep;
    c.svd_cutoff = 1.0 / 3.0;
    c.atom_position = "0.125";
    c.spectra_variants = "rabi_C_direct,chain";
    c.seed = 12345;
    const auto back = parse_config(emit_config(c));
    EXPECT_TRUE(back == c);
    EXPECT_EQ(back.svd_cutoff, c.svd_cutoff);
}

TEST(Config, UnknownKeyAndLineNumbers) {
    EXPECT_NE(error_of("mode_count = 3\nbogus = 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("mode_count = 3\nbogus = 1\n").find("bogus"), std::string::npos);
    EXPECT_NE(error_of("\n\nmode_count = three\n").find("line 3"), std::string::npos);
    EXPECT_NE(error_of("mode_count 3\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of("scenario = torus\n").find("torus"), std::string::npos);
}

TEST(Config, DuplicateKeyRejected) {
    const auto e = error_of("coupling = 0.1\n\ncoupling = 0.2\n");
    EXPECT_NE(e.find("line 3"), std::string::npos);
    EXPECT_NE(e.find("line 1"), std::string::npos);
}

TEST(Config, Overrides) {
    RunConfig c;
    apply_override(c, "coupling=0.25");
    apply_override(c, " scenario = coupling_profile ");
    EXPECT_DOUBLE_EQ(c.coupling, 0.25);
    EXPECT_EQ(c.scenario, Scenario::coupling_profile);
    EXPECT_THROW(apply_override(c, "coupling"), ConfigError);
    EXPECT_THROW(apply_override(c, "nope=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "count_coupled_only=maybe"), ConfigError);
}

TEST(Config, AtomPositionValidated) {
    RunConfig c;
    c.atom_position = "0.7";
    EXPECT_TRUE(mentions(validate_config(c), "atom_position"));
    c.atom_position = "left";
    EXPECT_TRUE(mentions(validate_config(c), "atom_position"));
    c.atom_position = "-0.2";
    EXPECT_TRUE(validate_config(c).empty());
}

TEST(Config, HashIsDeterministicAndIgnoresOutputDir) {
    RunConfig a, b;
    b.output_dir = "elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    b.coupling = 0.61;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Config, ScenarioNames) {
    for (const auto& [s, n] : scenario_names()) EXPECT_EQ(to_string(s), n);
    EXPECT_TRUE(is_dynamic(Scenario::pec_slab_adjacent));
    EXPECT_FALSE(is_dynamic(Scenario::spectra_sweep));
    EXPECT_TRUE(has_slab(Scenario::pec_slab_embedded));
    EXPECT_FALSE(has_slab(Scenario::pec_homogeneous));
    EXPECT_EQ(split_list(" a, b ,,c "), (std::vector<std::string>{"a", "b", "c"}));
}
