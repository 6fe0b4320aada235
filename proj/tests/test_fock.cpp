#include <gtest/gtest.h>

#include <cmath>

#include "cavityqed/fock.hpp"
#include "cavityqed/linalg.hpp"

using namespace cavityqed;

namespace {

MatrixXd single_mode_a(std::size_t n) {
    MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k < n; ++k) a(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(double(k));
    return a;
}

// I x .. x a x .. x I by explicit Kronecker products.
MatrixXd embedded_a(std::size_t modes, std::size_t n, std::size_t k) {
    MatrixXcd out = MatrixXcd::Identity(1, 1);
    for (std::size_t m = 0; m < modes; ++m) {
        const MatrixXd f = m == k ? single_mode_a(n) : MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        out = kron(out, f.cast<cplx>());
    }
    return out.real();
}

}  // namespace

TEST(FockSpace, DimensionAndOrdering) {
    const FockSpace fs({3, 4, std::nullopt});
    EXPECT_EQ(fs.dim(), 64u);
    EXPECT_EQ(fs.state(0), (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(fs.state(1), (std::vector<int>{0, 0, 1}));
    EXPECT_EQ(fs.state(4), (std::vector<int>{0, 1, 0}));
    EXPECT_EQ(fs.state(63), (std::vector<int>{3, 3, 3}));
    EXPECT_EQ(*fs.find({1, 2, 3}), 16u + 8u + 3u);
    EXPECT_FALSE(fs.find({4, 0, 0}).has_value());
}

TEST(FockSpace, AnnihilatorsMatchKroneckerConstruction) {
    const std::size_t modes = 3, n = 3;
    const FockSpace fs({modes, n, std::nullopt});
    for (std::size_t k = 0; k < modes; ++k) {
        const MatrixXd a = MatrixXd(fs.annihilation(k));
        EXPECT_LT((a - embedded_a(modes, n, k)).cwiseAbs().maxCoeff(), 1e-15) << "mode " << k;
        EXPECT_LT((MatrixXd(fs.number(k)) - a.transpose() * a).cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(FockSpace, CommutatorBrokenOnlyAtTopLevel) {
    const std::size_t n = 5;
    const FockSpace fs({1, n, std::nullopt});
    const MatrixXd a = MatrixXd(fs.annihilation(0));
    const MatrixXd c = a * a.transpose() - a.transpose() * a;
    for (std::size_t i = 0; i + 1 < n; ++i) EXPECT_NEAR(c(i, i), 1.0, 1e-14);
    EXPECT_NEAR(c(n - 1, n - 1), 1.0 - double(n), 1e-14);
}

TEST(FockSpace, OperatorsFromPieces) {
    const FockSpace fs({2, 3, std::nullopt});
    const MatrixXd a0 = MatrixXd(fs.annihilation(0)), a1 = MatrixXd(fs.annihilation(1));
    const MatrixXd hf = 1.5 * a0.transpose() * a0 + 2.5 * a1.transpose() * a1;
    EXPECT_LT((MatrixXd(fs.free_field({1.5, 2.5})) - hf).cwiseAbs().maxCoeff(), 1e-14);
    const MatrixXd q = 0.3 * (a0 + a0.transpose()) - 0.7 * (a1 + a1.transpose());
    EXPECT_LT((MatrixXd(fs.quadrature({0.3, -0.7})) - q).cwiseAbs().maxCoeff(), 1e-14);
    const MatrixXd p = 0.3 * (a0 - a0.transpose());
    EXPECT_LT((MatrixXd(fs.antiquadrature({0.3, 0.0})) - p).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FockSpace, TotalNumberCap) {
    const FockSpace fs({3, 4, std::size_t{3}});
    // states with n1 + n2 + n3 <= 3: C(6, 3)
    EXPECT_EQ(fs.dim(), 20u);
    for (std::size_t i = 0; i < fs.dim(); ++i) {
        int s = 0;
        for (int v : fs.state(i)) s += v;
        EXPECT_LE(s, 3);
    }
    // the total number operator commutes with any orthogonal mix of the modes
    const MatrixXd a0 = MatrixXd(fs.annihilation(0)), a1 = MatrixXd(fs.annihilation(1));
    const MatrixXd total = MatrixXd(fs.number(0) + fs.number(1) + fs.number(2));
    const double c = std::cos(0.4), s = std::sin(0.4);
    const MatrixXd b = c * a0 + s * a1;
    const MatrixXd hop = b.transpose() * b;
    EXPECT_LT((hop * total - total * hop).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(FockSpace, RejectsDegenerateTruncation) {
    EXPECT_THROW(FockSpace({0, 4, std::nullopt}), ConfigError);
    EXPECT_THROW(FockSpace({2, 1, std::nullopt}), ConfigError);
}

TEST(Linalg, KronAndPropagator) {
    MatrixXcd a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    const MatrixXcd k = kron(a, b);
    EXPECT_EQ(k(0, 1), cplx(1.0));
    EXPECT_EQ(k(3, 2), cplx(4.0));
    EXPECT_EQ(k(2, 1), cplx(3.0));
    const MatrixXcd u = unitary_propagator(b, 0.3);
    EXPECT_LT(unitarity_defect(u), 1e-14);
    EXPECT_NEAR(u(0, 0).real(), std::cos(0.3), 1e-14);
    EXPECT_NEAR(u(0, 1).imag(), -std::sin(0.3), 1e-14);
}
