#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cavityqed/chainmap.hpp"
#include "cavityqed/linalg.hpp"
#include "chain_oracle.hpp"

using namespace cavityqed;
using namespace cavityqed::chain;

namespace {

struct Input {
    std::vector<double> omega, g;
};

// w_k = k, g_k = 0.3 w_k^p
Input linear(std::size_t m, double power) {
    Input in;
    for (std::size_t k = 1; k <= m; ++k) {
        in.omega.push_back(double(k));
        in.g.push_back(0.3 * std::pow(double(k), power));
    }
    return in;
}

}  // namespace

TEST(ChainMap, SingleMode) {
    const auto ch = chain_map({2.5}, {0.4});
    EXPECT_DOUBLE_EQ(ch.rho, 0.4);
    ASSERT_EQ(ch.length(), 1u);
    EXPECT_DOUBLE_EQ(ch.xi[0], 2.5);
    EXPECT_TRUE(ch.t.empty());
    EXPECT_DOUBLE_EQ(ch.U(0, 0), 1.0);
    const auto naive = naive_chain_map({2.5}, {0.4});
    EXPECT_EQ(naive.xi, ch.xi);
    EXPECT_EQ(naive.U, ch.U);
}

TEST(ChainMap, TwoModeHandRecursion) {
    const double w = 1.7, d = 0.3, g = 0.2;
    const auto ch = chain_map({w - d, w + d}, {g, g});
    EXPECT_NEAR(ch.rho, std::sqrt(2.0) * g, 1e-15);
    ASSERT_EQ(ch.length(), 2u);
    EXPECT_NEAR(ch.xi[0], w, 1e-15);
    EXPECT_NEAR(ch.xi[1], w, 1e-14);
    EXPECT_NEAR(ch.t[0], d, 1e-14);
    // orthogonal conjugation of diag(omega) reproduces the tridiagonal chain
    const MatrixXd D = Eigen::Vector2d(w - d, w + d).asDiagonal();
    EXPECT_LT((ch.U * D * ch.U.transpose() - ch.tridiagonal()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ChainMap, FirstRowLumpsCouplings) {
    const auto in = linear(12, -0.5);
    const auto ch = chain_map(in.omega, in.g);
    for (std::size_t k = 0; k < in.g.size(); ++k) EXPECT_NEAR(ch.U(0, k), in.g[k] / ch.rho, 1e-15);
}

TEST(ChainMap, StabilizedMatchesExtendedPrecision) {
    for (double power : {-0.5, 0.5}) {
        const auto in = linear(100, power);
        const auto ch = chain_map(in.omega, in.g);
        const auto ref = oracle::lanczos(in.omega, in.g);
        ASSERT_EQ(ch.length(), ref.xi.size());
        EXPECT_NEAR(ch.rho, ref.rho, 1e-14 * ref.rho);
        for (std::size_t n = 0; n < ref.xi.size(); ++n) {
            EXPECT_NEAR(ch.xi[n], ref.xi[n], 1e-8 * std::abs(ref.xi[n])) << "n = " << n << ", power " << power;
            EXPECT_GE(ch.xi[n], 1.0 - 1e-12);
            EXPECT_LE(ch.xi[n], 100.0 + 1e-12);
        }
        for (std::size_t n = 0; n < ref.t.size(); ++n) EXPECT_NEAR(ch.t[n], ref.t[n], 1e-8 * ref.t[n]);
    }
}

TEST(ChainMap, NaiveRecursionLosesOrthogonality) {
    for (double power : {-0.5, 0.5}) {
        const auto in = linear(100, power);
        EXPECT_GT(naive_chain_map(in.omega, in.g).orthogonality_defect(), 1e-3) << "power " << power;
        EXPECT_LT(chain_map(in.omega, in.g).orthogonality_defect(), 1e-10);
    }
}

TEST(ChainMap, NaiveAgreesForShortChains) {
    for (std::size_t m = 1; m <= 10; ++m) {
        const auto in = linear(m, 0.5);
        const auto a = chain_map(in.omega, in.g);
        const auto b = naive_chain_map(in.omega, in.g);
        ASSERT_EQ(a.length(), b.length());
        for (std::size_t n = 0; n < a.length(); ++n) EXPECT_NEAR(a.xi[n], b.xi[n], 1e-8);
        for (std::size_t n = 0; n < a.t.size(); ++n) EXPECT_NEAR(a.t[n], b.t[n], 1e-8);
    }
}

TEST(ChainMap, OrthogonalUpToAThousandModes) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    Input in;
    for (std::size_t k = 1; k <= 1000; ++k) {
        in.omega.push_back(0.1 * double(k));
        in.g.push_back(u(rng) / std::sqrt(double(k)));
    }
    const auto ch = chain_map(in.omega, in.g);
    EXPECT_LT(ch.orthogonality_defect(), 1e-10);
}

TEST(ChainMap, SpectralBoundsAndTridiagonalSimilarity) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Input in;
    for (std::size_t k = 1; k <= 200; ++k) {
        in.omega.push_back(0.5 + 0.05 * double(k) + 0.01 * u(rng));
        in.g.push_back(u(rng));
    }
    const auto ch = chain_map(in.omega, in.g);
    const double lo = *std::min_element(in.omega.begin(), in.omega.end());
    const double hi = *std::max_element(in.omega.begin(), in.omega.end());
    for (double x : ch.xi) {
        EXPECT_GE(x, lo - 1e-12);
        EXPECT_LE(x, hi + 1e-12);
    }
    for (double t : ch.t) EXPECT_LE(std::abs(t), hi - lo);
    const Eigen::Map<const VectorXd> w(in.omega.data(), 200);
    EXPECT_LT((ch.U * w.asDiagonal() * ch.U.transpose() - ch.tridiagonal()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(ChainMap, DuplicateFrequenciesEndTheChainEarly) {
    const auto ch = chain_map({1.0, 1.0, 2.0}, {0.3, 0.4, 0.5});
    EXPECT_EQ(ch.length(), 2u);
    EXPECT_EQ(ch.U.rows(), 2);
    EXPECT_EQ(ch.U.cols(), 3);
    EXPECT_LT(ch.orthogonality_defect(), 1e-14);
}

TEST(ChainMap, RejectsDegenerateInput) {
    EXPECT_THROW(chain_map({1.0, 2.0}, {0.0, 0.0}), ConfigError);
    EXPECT_THROW(chain_map({1.0, 2.0}, {0.1}), DimensionError);
    EXPECT_THROW(chain_map({}, {}), DimensionError);
    EXPECT_THROW(chain_map({0.0}, {0.1}), ConfigError);
}

TEST(ModeBasis, ZeroAndSingleSiteExcitation) {
    const auto in = linear(5, 0.5);
    const auto ch = chain_map(in.omega, in.g);
    EXPECT_EQ(to_mode_basis(MatrixXcd::Zero(5, 5), ch.U).cwiseAbs().maxCoeff(), 0.0);
    MatrixXcd b = MatrixXcd::Zero(5, 5);
    b(0, 0) = 1.0;
    const MatrixXcd a = to_mode_basis(b, ch.U);
    for (int k = 0; k < 5; ++k)
        for (int l = 0; l < 5; ++l)
            EXPECT_NEAR(a(k, l).real(), in.g[k] * in.g[l] / (ch.rho * ch.rho), 1e-15);
}

TEST(ModeBasis, MatchesQuadrupleLoop) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    const auto in = linear(4, -0.5);
    const auto ch = chain_map(in.omega, in.g);
    MatrixXcd b(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) b(i, j) = cplx(n(rng), n(rng));
    b = (b + b.adjoint()).eval();
    const MatrixXcd a = to_mode_basis(b, ch.U);
    for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
            cplx s = 0.0;
            for (int m = 0; m < 4; ++m)
                for (int mp = 0; mp < 4; ++mp) s += ch.U(m, k) * ch.U(mp, l) * b(m, mp);
            EXPECT_LT(std::abs(a(k, l) - s), 1e-12);
        }
    EXPECT_THROW(to_mode_basis(MatrixXcd::Zero(3, 3), ch.U), DimensionError);
}
