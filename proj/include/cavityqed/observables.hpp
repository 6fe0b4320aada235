// observables.hpp — photon numbers and field correlations from chain-basis data

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "cavityqed/chainmap.hpp"
#include "cavityqed/errors.hpp"
#include "cavityqed/linalg.hpp"
#include "cavityqed/modes.hpp"

namespace cavityqed::obs {

// <a_k^+ a_k> = u_k^T B u_k for each column of U (raw, may be slightly negative).
inline VectorXd photon_numbers(const MatrixXcd& B, const MatrixXd& U) {
    const MatrixXcd a = chain::to_mode_basis(B, U);
    return a.diagonal().real();
}

inline VectorXd clip_nonnegative(VectorXd v) { return v.cwiseMax(0.0); }

// v_k(x) = sqrt(w_k) A_k(x) for the listed modes, one row per position.
inline MatrixXd field_amplitudes(const modes::ModeBasis& basis, const std::vector<std::size_t>& mode_index,
                                 const std::vector<double>& positions) {
    MatrixXd v(static_cast<Eigen::Index>(positions.size()), static_cast<Eigen::Index>(mode_index.size()));
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!basis.grid().contains(positions[i])) throw ConfigError("field position outside the cavity");
        for (std::size_t c = 0; c < mode_index.size(); ++c) {
            const std::size_t k = mode_index[c];
            v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                std::sqrt(basis.frequency(k)) * basis.value(k, positions[i]);
        }
    }
    return v;
}

// G1(x) = (1/2L) v(x)^T (U^T B U) v(x); column c of U belongs to basis
// mode mode_index[c].
inline VectorXd field_correlation(const MatrixXcd& B, const MatrixXd& U, const modes::ModeBasis& basis,
                                  const std::vector<std::size_t>& mode_index, const std::vector<double>& positions) {
    if (static_cast<std::size_t>(U.cols()) != mode_index.size())
        throw DimensionError("mode index list does not match the chain transform");
    const MatrixXcd a = chain::to_mode_basis(B, U);
    const MatrixXd v = field_amplitudes(basis, mode_index, positions);
    const MatrixXcd av = v.cast<cplx>() * a;  // row i: v_i^T A
    VectorXd g(v.rows());
    for (Eigen::Index i = 0; i < v.rows(); ++i) g(i) = (av.row(i) * v.row(i).transpose().cast<cplx>())(0, 0).real();
    return g / (2.0 * basis.grid().length());
}

// Positions -L/2 .. L/2 inclusive, n samples.
inline std::vector<double> uniform_positions(double length, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = -0.5 * length + length * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

}  // namespace cavityqed::obs
