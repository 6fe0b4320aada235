#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cavityqed/atom.hpp"
#include "cavityqed/chainmap.hpp"
#include "cavityqed/hamiltonians.hpp"
#include "cavityqed/modes.hpp"

using namespace cavityqed;
using namespace cavityqed::ham;
using modes::Couplings;

namespace {

Couplings pec_couplings(std::size_t m, double g_over_w1, double r0 = 0.0) {
    const SpatialGrid grid(std::numbers::pi, 1001, Boundary::pec);
    const auto basis = modes::analytic_modes_pec(m, 1.0, grid);
    const auto at = modes::calibrate_dipole(basis, atom::TwoLevelAtom{1.0, 1.0, r0}, g_over_w1);
    return modes::coupling_coefficients(basis, at);
}

Couplings zero_couplings(std::vector<double> omega) {
    return modes::make_couplings(1.0, std::numbers::pi, omega, std::vector<double>(omega.size(), 1.0), 0.0);
}

const atom::AtomSpectrum& well() {
    static const auto s = atom::default_double_well_spectrum(500.0, 40);
    return s;
}

VectorXd sorted_eigs(const MatrixXcd& h) { return hermitian_eigenvalues(h); }

double max_rel_diff(const VectorXd& a, const VectorXd& b) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a(i) - b(i)) / std::max(1.0, std::abs(b(i))));
    return d;
}

// Every sum of one atom level and photon numbers n_k < cutoff.
std::vector<double> minkowski(const std::vector<double>& atom, const std::vector<double>& omega, int cutoff) {
    std::vector<double> out = atom;
    for (double w : omega) {
        std::vector<double> next;
        for (double e : out)
            for (int n = 0; n < cutoff; ++n) next.push_back(e + n * w);
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void expect_spectrum(const MatrixXcd& h, std::vector<double> expected, double tol) {
    const VectorXd ev = sorted_eigs(h);
    ASSERT_EQ(static_cast<std::size_t>(ev.size()), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(ev(static_cast<Eigen::Index>(i)), expected[i], tol);
}

}  // namespace

TEST(Variant, NamesRoundTrip) {
    for (auto v : {Variant::full_C, Variant::full_D, Variant::rabi_C_direct, Variant::rabi_D_direct,
                   Variant::rabi_C_proper, Variant::rabi_D_proper, Variant::chain})
        EXPECT_EQ(variant_from_string(to_string(v)), v);
    EXPECT_THROW(variant_from_string("rabi"), ConfigError);
}

TEST(Decoupled, RabiVariantsAreMinkowskiSums) {
    const auto c = zero_couplings({1.0, 2.0});
    const FockTruncation tr{2, 4, std::nullopt};
    const auto expected = minkowski({-0.5, 0.5}, {1.0, 2.0}, 4);
    expect_spectrum(build_rabi_coulomb_direct(c, tr).matrix, expected, 1e-10);
    expect_spectrum(build_rabi_dipole_direct(well(), c, tr).matrix, expected, 1e-10);
    expect_spectrum(build_rabi_coulomb_proper(c, tr).matrix, expected, 1e-10);
    expect_spectrum(build_rabi_coulomb_conjugated(c, tr).matrix, expected, 1e-10);
    expect_spectrum(build_rabi_dipole_proper(c, tr).matrix, expected, 1e-10);
}

TEST(Decoupled, FullVariantsAreMinkowskiSums) {
    const auto c = zero_couplings({1.0, 3.0});
    const FockTruncation tr{2, 3, std::nullopt};
    const std::size_t n = 12;
    std::vector<double> atom;
    for (std::size_t i = 0; i < n; ++i) atom.push_back(well().energies(static_cast<Eigen::Index>(i)) - well().energies(0));
    const auto expected = minkowski(atom, {1.0, 3.0}, 3);
    expect_spectrum(build_full_dipole(well(), c, tr, n).matrix, expected, 1e-10);
    expect_spectrum(build_full_coulomb(well(), c, tr, n).matrix, expected, 1e-10);
}

TEST(Decoupled, ResonantSingleModeGaps) {
    const auto h = build_rabi_dipole_proper(zero_couplings({1.0}), {1, 6, std::nullopt});
    const VectorXd g = spectrum_gaps(h, 6);
    const std::vector<double> expected{0, 1, 1, 2, 2, 3};
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(g(i), expected[i], 1e-12);
}

TEST(Builders, Hermitian) {
    const auto c = pec_couplings(3, 0.5, 0.37);
    const FockTruncation tr{3, 4, std::nullopt};
    for (const auto& h : {build_rabi_coulomb_direct(c, tr), build_rabi_dipole_direct(well(), c, tr),
                          build_rabi_coulomb_proper(c, tr), build_rabi_coulomb_conjugated(c, tr),
                          build_rabi_dipole_proper(c, tr), build_full_dipole(well(), c, {3, 3, std::nullopt}, 12),
                          build_full_coulomb(well(), c, {3, 3, std::nullopt}, 12)})
        EXPECT_LT(hermiticity_residual(h.matrix), 1e-12) << to_string(h.variant);
}

TEST(Builders, CapacityGuard) {
    const auto c = pec_couplings(3, 0.3, 0.37);
    BuildOptions opt;
    opt.max_dim = 100;
    EXPECT_THROW(build_rabi_dipole_proper(c, {3, 5, std::nullopt}, opt), CapacityError);
    EXPECT_THROW(build_full_dipole(well(), c, {3, 3, std::nullopt}, 40, opt), CapacityError);
    EXPECT_THROW(build_full_dipole(well(), c, {3, 3, std::nullopt}, 41), ConfigError);
    EXPECT_THROW(build_rabi_dipole_proper(c, {2, 5, std::nullopt}), DimensionError);
}

TEST(Builders, SpectatorSplittingLeavesGapsUnchanged) {
    const auto c = pec_couplings(4, 0.4);  // centred: modes 2 and 4 uncoupled
    const FockTruncation tr{4, 5, std::nullopt};
    BuildOptions whole;
    whole.split_uncoupled = false;
    const auto split = build_rabi_dipole_proper(c, tr);
    const auto full = build_rabi_dipole_proper(c, tr, whole);
    EXPECT_EQ(split.spectators.size(), 2u);
    EXPECT_LT(split.dim(), full.dim());
    EXPECT_LT((spectrum_gaps(split, 12) - spectrum_gaps(full, 12)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DipoleProper, DroppingSelfEnergyIsAUniformShift) {
    const auto c = pec_couplings(3, 0.6, 0.2);
    const FockTruncation tr{3, 4, std::nullopt};
    BuildOptions drop;
    drop.drop_self_energy = true;
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c.g_d[k] * c.g_d[k] / c.omega[k];
    const VectorXd with = sorted_eigs(build_rabi_dipole_proper(c, tr).matrix);
    const VectorXd without = sorted_eigs(build_rabi_dipole_proper(c, tr, drop).matrix);
    EXPECT_LT((with - without - VectorXd::Constant(with.size(), s)).cwiseAbs().maxCoeff(), 1e-10);
}

// H = w_a/2 sz + w a^+a - i g sx (a - a^+) + g^2/w, element by element in |s, n>.
TEST(DipoleProper, SingleModeRabiOracle) {
    const double g = 0.1;
    const int n = 30;
    MatrixXcd hc = MatrixXcd::Zero(2 * n, 2 * n);
    for (int s = 0; s < 2; ++s)
        for (int m = 0; m < n; ++m) {
            hc(s * n + m, s * n + m) = (s == 0 ? -0.5 : 0.5) + m + g * g;
            const int t = 1 - s;
            if (m + 1 < n) {
                hc(s * n + m, t * n + m + 1) += -kI * g * std::sqrt(m + 1.0);
                hc(t * n + m + 1, s * n + m) += kI * g * std::sqrt(m + 1.0);
            }
        }
    const VectorXd oracle = hermitian_eigenvalues(hc);
    const auto one = modes::make_couplings(1.0, 0.5, {1.0}, {1.0}, g);  // g_D = d sqrt(w / 2L) = g
    const VectorXd got = sorted_eigs(build_rabi_dipole_proper(one, {1, static_cast<std::size_t>(n), std::nullopt}).matrix);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(got(i), oracle(i), 1e-10);
    // weak resonant coupling: vacuum Rabi doublet split by ~2g
    EXPECT_NEAR(oracle(2) - oracle(1), 2.0 * g, 0.02);
}

TEST(CoulombProper, ConjugationFormIsIsospectralAtLowEnergy) {
    const auto c = pec_couplings(3, 0.4);
    const FockTruncation tr{3, 14, std::nullopt};
    const VectorXd a = spectrum_gaps(build_rabi_coulomb_proper(c, tr), 8);
    const VectorXd b = spectrum_gaps(build_rabi_coulomb_conjugated(c, tr), 8);
    EXPECT_LT(max_rel_diff(a, b), 1e-6);
}

TEST(GaugeInvariance, ProperTruncationsAgree) {
    for (double g : {0.2, 0.4}) {
        const auto c = pec_couplings(3, g);
        const FockTruncation tr{3, 12, std::nullopt};
        const VectorXd a = spectrum_gaps(build_rabi_coulomb_proper(c, tr), 8);
        const VectorXd b = spectrum_gaps(build_rabi_dipole_proper(c, tr), 8);
        EXPECT_LT(max_rel_diff(a, b), 1e-6) << "g = " << g;
    }
}

TEST(GaugeInvariance, ProperTruncationsAgreeAtTenPhotons) {
    for (double g : {0.2, 0.4}) {
        const auto c = pec_couplings(3, g);
        const FockTruncation tr{3, 10, std::nullopt};
        const VectorXd a = spectrum_gaps(build_rabi_coulomb_proper(c, tr), 9);
        const VectorXd b = spectrum_gaps(build_rabi_dipole_proper(c, tr), 9);
        EXPECT_LT(max_rel_diff(a, b), 1e-6) << "g = " << g;
    }
}

TEST(GaugeInvariance, ProperTruncationGapShrinksWithCutoff) {
    // at g = 0.6 the two gauges still differ at N = 10 and meet only near N = 12
    const auto c = pec_couplings(3, 0.6);
    double prev = 1.0;
    for (int n : {6, 8, 10}) {
        const FockTruncation tr{3, n, std::nullopt};
        const VectorXd a = spectrum_gaps(build_rabi_coulomb_proper(c, tr), 9);
        const VectorXd b = spectrum_gaps(build_rabi_dipole_proper(c, tr), 9);
        const double d = max_rel_diff(a, b);
        EXPECT_LT(d, prev) << "N = " << n;
        prev = d;
    }
    EXPECT_LT(prev, 1e-4);
}

TEST(GaugeInvariance, FullHamiltoniansAgree) {
    const auto c = pec_couplings(2, 0.2);
    const FockTruncation tr{2, 8, std::nullopt};
    const VectorXd a = lowest_levels(build_full_coulomb(well(), c, tr, 40), 8);
    const VectorXd b = lowest_levels(build_full_dipole(well(), c, tr, 40), 8);
    EXPECT_LT(max_rel_diff(a, b), 1e-6);
}

TEST(GaugeBreaking, DirectCoulombTruncationDeviates) {
    // g_C,1 / w_1 = 0.5 means g_D,1 / w_1 = 0.5 on the resonant fundamental
    const auto c = pec_couplings(5, 0.5);
    const FockTruncation tr{5, 8, std::nullopt};
    const VectorXd direct = spectrum_gaps(build_rabi_coulomb_direct(c, tr), 3);
    const VectorXd proper = spectrum_gaps(build_rabi_dipole_proper(c, tr), 3);
    EXPECT_GT(std::abs(direct(2) - proper(2)) / proper(2), 0.01);
}

TEST(DipoleDirect, ProjectedSelfEnergyIsPositive) {
    const Eigen::Matrix2d p = projected_x2(well(), 40);
    EXPECT_NEAR(p(0, 1), 0.0, 1e-10);
    EXPECT_GE(p(0, 0), 1.0);
    EXPECT_GE(p(1, 1), 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(p);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_THROW(projected_x2(well(), 5), ConfigError);
}

TEST(FullDipole, SelfEnergyBlockPositiveSemidefinite) {
    const auto c = pec_couplings(1, 0.7);
    const auto h0 = build_full_dipole(well(), zero_couplings({1.0}), {1, 2, std::nullopt}, 20);
    const auto h = build_full_dipole(well(), c.scaled(0.0), {1, 2, std::nullopt}, 20);
    EXPECT_LT((h.matrix - h0.matrix).cwiseAbs().maxCoeff(), 1e-14);
    const MatrixXd x = well().position_matrix(20) / well().position_matrix(2)(0, 1);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(x * x);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
}

TEST(Chain, SingleModeChainIsTheRabiModel) {
    const auto c = pec_couplings(1, 0.6);
    const auto ch = chain::chain_map(c.omega, c.g_d);
    BuildOptions drop;
    drop.drop_self_energy = true;
    const VectorXd a = sorted_eigs(build_chain_dense(atom::TwoLevelAtom{1.0, 0.0, 0.0}, ch, {1, 8, std::nullopt}).matrix);
    const VectorXd b = sorted_eigs(build_rabi_dipole_proper(c, {1, 8, std::nullopt}, drop).matrix);
    EXPECT_LT(max_rel_diff(a, b), 1e-12);
}

TEST(Chain, IsospectralWithStarUnderTotalNumberCap) {
    for (double r0 : {0.3, 0.71}) {
        const auto c = pec_couplings(3, 0.5, r0);
        const auto ch = chain::chain_map(c.omega, c.g_d);
        ASSERT_EQ(ch.length(), 3u);
        const FockTruncation tr{3, 4, std::size_t{3}};
        BuildOptions drop;
        drop.drop_self_energy = true;
        const VectorXd a = sorted_eigs(build_chain_dense(atom::TwoLevelAtom{1.0, 0.0, 0.0}, ch, tr).matrix);
        const VectorXd b = sorted_eigs(build_rabi_dipole_proper(c, tr, drop).matrix);
        EXPECT_LT(max_rel_diff(a, b), 1e-10);
    }
}

TEST(Chain, HermitianAndLengthChecked) {
    const auto c = pec_couplings(4, 0.5, 0.3);
    const auto ch = chain::chain_map(c.omega, c.g_d);
    const auto h = build_chain_dense(atom::TwoLevelAtom{1.0, 0.0, 0.0}, ch, {ch.length(), 3, std::nullopt});
    EXPECT_LT(hermiticity_residual(h.matrix), 1e-12);
    EXPECT_THROW(build_chain_dense(atom::TwoLevelAtom{}, ch, {2, 3, std::nullopt}), DimensionError);
}

TEST(Trk, SelfEnergySumRule) {
    const auto c = pec_couplings(5, 0.6, 0.3);
    for (const auto& t : trk_selfenergy_check(c, 6))
        EXPECT_LT((t.sum_rule - t.expected).cwiseAbs().maxCoeff(), 1e-12);
    for (const auto& t : trk_selfenergy_check(c.scaled(0.0), 6)) EXPECT_EQ(t.sum_rule.cwiseAbs().maxCoeff(), 0.0);
    const auto one = trk_selfenergy_check(c, 4);
    const auto two = trk_selfenergy_check(c.scaled(2.0), 4);
    for (std::size_t k = 0; k < one.size(); ++k)
        EXPECT_LT((two[k].sum_rule - 4.0 * one[k].sum_rule).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Trk, DiamagneticTermMatchesKroneckerAssembly) {
    const auto c = pec_couplings(3, 0.6, 0.3);
    const std::size_t n = 4;
    MatrixXd a1 = MatrixXd::Zero(n, n);
    for (std::size_t k = 1; k < n; ++k) a1(k - 1, k) = std::sqrt(double(k));
    const MatrixXd x1 = a1 + a1.transpose();
    const MatrixXd id = MatrixXd::Identity(n, n);
    MatrixXcd xc = MatrixXcd::Zero(n * n * n, n * n * n);
    for (std::size_t k = 0; k < 3; ++k) {
        MatrixXcd term = MatrixXcd::Identity(1, 1);
        for (std::size_t m = 0; m < 3; ++m) term = kron(term, (m == k ? x1 : id).cast<cplx>());
        xc += c.g_c[k] * term;
    }
    const MatrixXcd expected = xc * xc / c.omega_a;
    EXPECT_LT((diamagnetic_term(c, {3, n, std::nullopt}) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Convergence, LoopStopsOnceGapsSettle) {
    const auto c = zero_couplings({1.0, 2.0});
    const auto r = converge_cutoff([&](std::size_t n) { return build_rabi_dipole_proper(c, {2, n, std::nullopt}); }, 8);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.cutoff, 8u);
    const auto strong = pec_couplings(3, 1.0);
    const auto s = converge_cutoff([&](std::size_t n) { return build_rabi_dipole_proper(strong, {3, n, std::nullopt}); },
                                   8, 2, 2, 4, 1e-14);
    EXPECT_FALSE(s.converged);
    EXPECT_EQ(s.cutoff, 4u);
}

TEST(Gaps, FirstIsZeroAndOrdered) {
    const auto h = build_rabi_coulomb_direct(pec_couplings(3, 0.8), {3, 6, std::nullopt});
    const VectorXd g = spectrum_gaps(h, 8);
    EXPECT_EQ(g(0), 0.0);
    for (Eigen::Index i = 1; i < g.size(); ++i) EXPECT_GE(g(i), g(i - 1));
}
