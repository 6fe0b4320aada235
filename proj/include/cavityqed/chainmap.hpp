// chainmap.hpp — star-to-chain orthogonal transform of the multimode Rabi model
//
// H = w_a/2 sz + sum_k w_k a_k^+ a_k - i sx sum_k g_k (a_k - a_k^+)
// becomes a nearest-neighbour chain
// H = w_a/2 sz - i rho sx (b_1 - b_1^+) + sum_n xi_n b_n^+ b_n + t_n (b_n^+ b_{n+1} + h.c.)
// with b_n = sum_k U_nk a_k.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cavityqed/errors.hpp"

namespace cavityqed::chain {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ChainTransform {
    MatrixXd U;                // chain_length x M_c, orthonormal rows
    double rho{0.0};
    std::vector<double> xi;    // chain_length
    std::vector<double> t;     // chain_length - 1 hoppings (the last one, t = 0, is implicit)
    std::vector<double> defect;  // max |<u_n, u_m> - delta_nm| over m <= n

    std::size_t length() const { return xi.size(); }
    std::size_t modes() const { return static_cast<std::size_t>(U.cols()); }

    MatrixXd tridiagonal() const {
        const auto n = static_cast<Eigen::Index>(length());
        MatrixXd T = MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) T(i, i) = xi[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < n; ++i) T(i, i + 1) = T(i + 1, i) = t[static_cast<std::size_t>(i)];
        return T;
    }

    double orthogonality_defect() const {
        const auto n = U.rows();
        return (U * U.transpose() - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
    }
};

// Lanczos-type recursion for the rows of U. With `stabilize`, every new row
// is re-orthogonalised (modified Gram-Schmidt) against all earlier rows
// before its norm t_n and frequency xi_{n+1} are taken. The chain ends
// early when t_n < 1e-12 max(omega).
inline ChainTransform chain_map(const std::vector<double>& omega, const std::vector<double>& g_d,
                                bool stabilize = true) {
    if (omega.empty() || omega.size() != g_d.size())
        throw DimensionError("chain map needs equal-length, non-empty frequency and coupling arrays");
    for (double w : omega)
        if (!(w > 0.0)) throw ConfigError("chain map needs positive mode frequencies");
    const auto m = static_cast<Eigen::Index>(omega.size());
    const Eigen::Map<const VectorXd> w(omega.data(), m);
    const Eigen::Map<const VectorXd> g(g_d.data(), m);
    const double rho = g.norm();
    if (!(rho > 0.0)) throw ConfigError("degenerate input: every coupling is zero");
    const double stop = 1e-12 * w.maxCoeff();

    ChainTransform out;
    out.rho = rho;
    std::vector<VectorXd> rows{g / rho};
    out.xi.push_back(w.dot(rows[0].cwiseAbs2()));
    while (static_cast<Eigen::Index>(rows.size()) < m) {
        const std::size_t n = rows.size() - 1;
        VectorXd r = (w.array() - out.xi[n]).matrix().cwiseProduct(rows[n]);
        if (n > 0) r -= out.t[n - 1] * rows[n - 1];
        if (stabilize)
            for (const auto& q : rows) r -= q.dot(r) * q;
        const double tn = r.norm();
        if (tn < stop) break;
        out.t.push_back(tn);
        rows.push_back(r / tn);
        out.xi.push_back(w.dot(rows.back().cwiseAbs2()));
    }

    out.U.resize(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t n = 0; n < rows.size(); ++n) out.U.row(static_cast<Eigen::Index>(n)) = rows[n].transpose();
    for (std::size_t n = 0; n < rows.size(); ++n) {
        double d = 0.0;
        for (std::size_t k = 0; k <= n; ++k)
            d = std::max(d, std::abs(rows[n].dot(rows[k]) - (k == n ? 1.0 : 0.0)));
        out.defect.push_back(d);
    }
    return out;
}

inline ChainTransform naive_chain_map(const std::vector<double>& omega, const std::vector<double>& g_d) {
    return chain_map(omega, g_d, false);
}

// A_kk' = u_k^T B u_k' with u_k the k-th column of U.
inline MatrixXcd to_mode_basis(const MatrixXcd& B, const MatrixXd& U) {
    if (B.rows() != U.rows() || B.cols() != U.rows())
        throw DimensionError("correlation matrix does not match the chain transform");
    const MatrixXcd Uc = U.cast<std::complex<double>>();
    return Uc.transpose() * B * Uc;
}

}  // namespace cavityqed::chain
