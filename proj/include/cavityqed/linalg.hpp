// linalg.hpp — small dense linear-algebra helpers on top of Eigen

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "cavityqed/errors.hpp"

namespace cavityqed {

using cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// max|H - H^dagger| / max|H|; zero for the zero matrix.
inline double hermiticity_residual(const MatrixXcd& h) {
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

inline VectorXd hermitian_eigenvalues(const MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    return es.eigenvalues();
}

// f(H) for Hermitian H through its eigendecomposition.
inline MatrixXcd hermitian_function(const MatrixXcd& h, const std::function<cplx(double)>& f) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    VectorXcd fd(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < fd.size(); ++i) fd(i) = f(es.eigenvalues()(i));
    return es.eigenvectors() * fd.asDiagonal() * es.eigenvectors().adjoint();
}

// exp(-i H t)
inline MatrixXcd unitary_propagator(const MatrixXcd& h, double t) {
    return hermitian_function(h, [t](double e) { return std::exp(-kI * e * t); });
}

inline double unitarity_defect(const MatrixXcd& u) {
    return (u.adjoint() * u - MatrixXcd::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff();
}

}  // namespace cavityqed
