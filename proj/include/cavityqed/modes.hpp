// modes.hpp — cavity mode bases (analytic and numerical) and coupling coefficients
//
// Mode functions are normalised as (1/L) sum_j Phi_k(j) eps_r(j) Phi_k'(j) dx = delta_kk'
// with the cavity length L playing the role of the 1D volume.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "cavityqed/atom.hpp"
#include "cavityqed/errors.hpp"
#include "cavityqed/grid.hpp"

namespace cavityqed::modes {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using atom::TwoLevelAtom;

// Relative permittivity on grid nodes. Each entry is the average of eps_r(x)
// over the node's dual cell [x_j - dx/2, x_j + dx/2], so a slab face falling
// inside a cell contributes its volume fraction.
struct PermittivityProfile {
    VectorXd eps;

    static PermittivityProfile homogeneous(const SpatialGrid& grid, double eps_r = 1.0) {
        return {VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), eps_r)};
    }

    static PermittivityProfile slab(const SpatialGrid& grid, double center, double thickness,
                                    double eps_r) {
        if (!(thickness > 0.0)) throw ConfigError("slab thickness must be positive");
        if (eps_r < 1.0) throw ConfigError("slab permittivity must be >= 1");
        const double lo = center - 0.5 * thickness;
        const double hi = center + 0.5 * thickness;
        PermittivityProfile p = homogeneous(grid);
        const double dx = grid.spacing();
        for (std::size_t j = 0; j < grid.size(); ++j) {
            double a = grid.x(j) - 0.5 * dx;
            double b = grid.x(j) + 0.5 * dx;
            if (grid.boundary() == Boundary::pec) {
                a = std::max(a, grid.left());
                b = std::min(b, -grid.left());
            }
            const double overlap = std::max(0.0, std::min(b, hi) - std::max(a, lo));
            p.eps(static_cast<Eigen::Index>(j)) = 1.0 + (eps_r - 1.0) * overlap / (b - a);
        }
        return p;
    }

    // Linear resampling of (x, eps_r) samples; values outside the sampled range are clamped.
    static PermittivityProfile from_samples(const SpatialGrid& grid, const std::vector<double>& xs,
                                            const std::vector<double>& values) {
        if (xs.size() != values.size() || xs.size() < 2)
            throw ConfigError("permittivity samples need at least two (x, eps_r) rows");
        if (!std::is_sorted(xs.begin(), xs.end()))
            throw ConfigError("permittivity sample positions must be ascending");
        PermittivityProfile p = homogeneous(grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
            const double x = grid.x(j);
            double v;
            if (x <= xs.front()) {
                v = values.front();
            } else if (x >= xs.back()) {
                v = values.back();
            } else {
                const auto it = std::upper_bound(xs.begin(), xs.end(), x);
                const auto i = static_cast<std::size_t>(it - xs.begin());
                const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                v = (1.0 - w) * values[i - 1] + w * values[i];
            }
            if (!(v >= 1.0) || !std::isfinite(v))
                throw ConfigError("relative permittivity must be finite and >= 1");
            p.eps(static_cast<Eigen::Index>(j)) = v;
        }
        return p;
    }
};

enum class ModeShape { numerical, periodic_cos, periodic_sin, pec_cos, pec_sin };

class ModeBasis {
public:
    ModeBasis(Boundary boundary, SpatialGrid grid, std::vector<double> frequencies,
              MatrixXd eigenfunctions, VectorXd eps, std::vector<ModeShape> shapes,
              std::vector<double> wavenumbers)
        : boundary_(boundary),
          grid_(std::move(grid)),
          frequencies_(std::move(frequencies)),
          phi_(std::move(eigenfunctions)),
          eps_(std::move(eps)),
          shapes_(std::move(shapes)),
          wavenumbers_(std::move(wavenumbers)) {}

    Boundary boundary() const { return boundary_; }
    const SpatialGrid& grid() const { return grid_; }
    std::size_t size() const { return frequencies_.size(); }
    const std::vector<double>& frequencies() const { return frequencies_; }
    double frequency(std::size_t k) const { return frequencies_[k]; }
    const MatrixXd& eigenfunctions() const { return phi_; }
    const VectorXd& permittivity() const { return eps_; }
    ModeShape shape(std::size_t k) const { return shapes_[k]; }
    bool analytic() const { return !shapes_.empty() && shapes_.front() != ModeShape::numerical; }

    // A_k(x): closed form for analytic modes, linear interpolation of the
    // grid samples otherwise (wrapping for periodic grids).
    double value(std::size_t k, double x) const {
        const double kw = wavenumbers_[k];
        switch (shapes_[k]) {
            case ModeShape::periodic_cos:
            case ModeShape::pec_cos:
                return std::numbers::sqrt2 * std::cos(kw * x);
            case ModeShape::periodic_sin:
            case ModeShape::pec_sin:
                return std::numbers::sqrt2 * std::sin(kw * x);
            case ModeShape::numerical:
                break;
        }
        if (!grid_.contains(x)) {
            std::ostringstream msg;
            msg << "interpolation position " << x << " outside the grid";
            throw ConfigError(msg.str());
        }
        const double s = (x - grid_.left()) / grid_.spacing();
        auto j = static_cast<Eigen::Index>(std::floor(s));
        const auto n = static_cast<Eigen::Index>(grid_.size());
        const auto col = static_cast<Eigen::Index>(k);
        if (grid_.boundary() == Boundary::periodic) {
            const double w = s - static_cast<double>(j);
            const Eigen::Index j0 = ((j % n) + n) % n;
            const Eigen::Index j1 = (j0 + 1) % n;
            return (1.0 - w) * phi_(j0, col) + w * phi_(j1, col);
        }
        j = std::clamp<Eigen::Index>(j, 0, n - 2);
        const double w = s - static_cast<double>(j);
        return (1.0 - w) * phi_(j, col) + w * phi_(j + 1, col);
    }

    // (1/L) Phi^T diag(eps) Phi dx
    MatrixXd gram() const {
        return phi_.transpose() * eps_.asDiagonal() * phi_ * (grid_.spacing() / grid_.length());
    }

private:
    Boundary boundary_;
    SpatialGrid grid_;
    std::vector<double> frequencies_;
    MatrixXd phi_;
    VectorXd eps_;
    std::vector<ModeShape> shapes_;
    std::vector<double> wavenumbers_;
};

inline void require_length(const SpatialGrid& grid, double expected, const char* what) {
    if (std::abs(grid.length() - expected) > 1e-9 * expected) {
        std::ostringstream msg;
        msg << "configuration error: " << what << " requires L = " << expected << ", got "
            << grid.length();
        throw ConfigError(msg.str());
    }
}

// Periodic lattice of length lambda_a. `pairs` degenerate pairs
// sqrt2 cos(kx), sqrt2 sin(kx) with omega = k omega_a, k = 1..pairs.
inline ModeBasis analytic_modes_periodic(std::size_t pairs, double omega_a, const SpatialGrid& grid) {
    if (pairs == 0) throw ConfigError("mode count must be positive");
    if (!(omega_a > 0.0)) throw ConfigError("omega_a must be positive");
    if (grid.boundary() != Boundary::periodic)
        throw ConfigError("configuration error: periodic modes need a periodic grid");
    require_length(grid, 2.0 * std::numbers::pi / omega_a, "periodic lattice");
    const auto n = static_cast<Eigen::Index>(grid.size());
    MatrixXd phi(n, static_cast<Eigen::Index>(2 * pairs));
    std::vector<double> freq, wav;
    std::vector<ModeShape> shapes;
    for (std::size_t p = 1; p <= pairs; ++p) {
        const double kw = 2.0 * std::numbers::pi * static_cast<double>(p) / grid.length();
        for (ModeShape s : {ModeShape::periodic_cos, ModeShape::periodic_sin}) {
            freq.push_back(static_cast<double>(p) * omega_a);
            wav.push_back(kw);
            shapes.push_back(s);
        }
    }
    ModeBasis tmp(Boundary::periodic, grid, freq, MatrixXd(), VectorXd::Ones(n), shapes, wav);
    for (Eigen::Index c = 0; c < phi.cols(); ++c)
        for (Eigen::Index j = 0; j < n; ++j)
            phi(j, c) = tmp.value(static_cast<std::size_t>(c), grid.x(static_cast<std::size_t>(j)));
    return ModeBasis(Boundary::periodic, grid, std::move(freq), std::move(phi), VectorXd::Ones(n),
                     std::move(shapes), std::move(wav));
}

// Homogeneous PEC cavity of length lambda_a / 2. Odd k: sqrt2 cos(k pi x / L),
// even k: sqrt2 sin(k pi x / L); both vanish at x = +-L/2.
inline ModeBasis analytic_modes_pec(std::size_t count, double omega_a, const SpatialGrid& grid) {
    if (count == 0) throw ConfigError("mode count must be positive");
    if (!(omega_a > 0.0)) throw ConfigError("omega_a must be positive");
    if (grid.boundary() != Boundary::pec)
        throw ConfigError("configuration error: PEC modes need a bounded grid");
    require_length(grid, std::numbers::pi / omega_a, "PEC cavity");
    const auto n = static_cast<Eigen::Index>(grid.size());
    std::vector<double> freq, wav;
    std::vector<ModeShape> shapes;
    for (std::size_t k = 1; k <= count; ++k) {
        freq.push_back(static_cast<double>(k) * omega_a);
        wav.push_back(static_cast<double>(k) * std::numbers::pi / grid.length());
        shapes.push_back(k % 2 == 1 ? ModeShape::pec_cos : ModeShape::pec_sin);
    }
    ModeBasis tmp(Boundary::pec, grid, freq, MatrixXd(), VectorXd::Ones(n), shapes, wav);
    MatrixXd phi(n, static_cast<Eigen::Index>(count));
    for (Eigen::Index c = 0; c < phi.cols(); ++c)
        for (Eigen::Index j = 0; j < n; ++j)
            phi(j, c) = tmp.value(static_cast<std::size_t>(c), grid.x(static_cast<std::size_t>(j)));
    // cos/sin vanish at the walls only up to rounding; pin them.
    phi.row(0).setZero();
    phi.row(n - 1).setZero();
    return ModeBasis(Boundary::pec, grid, std::move(freq), std::move(phi), VectorXd::Ones(n),
                     std::move(shapes), std::move(wav));
}

struct Eigenproblem {
    MatrixXd stiffness;  // over the unknowns (interior nodes for PEC)
    VectorXd mass;       // diagonal
    Boundary boundary;
};

// K = c^2/dx^2 tridiag(-1, 2, -1) (wrapped for periodic), M = diag(eps_r).
// PEC walls are Dirichlet: the two boundary rows are eliminated.
inline Eigenproblem assemble_eigenproblem(const PermittivityProfile& profile, const SpatialGrid& grid,
                                          Boundary boundary, double c = 1.0) {
    if (profile.eps.size() != static_cast<Eigen::Index>(grid.size()))
        throw DimensionError("permittivity profile does not match the grid");
    if (boundary != grid.boundary())
        throw ConfigError("eigenproblem boundary differs from the grid boundary");
    const double dx = grid.spacing();
    const double s = c * c / (dx * dx);
    const auto n_all = static_cast<Eigen::Index>(grid.size());
    if (boundary == Boundary::pec) {
        const Eigen::Index n = n_all - 2;
        MatrixXd k = MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            k(i, i) = 2.0 * s;
            if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -s;
        }
        return {std::move(k), profile.eps.segment(1, n), boundary};
    }
    MatrixXd k = MatrixXd::Zero(n_all, n_all);
    for (Eigen::Index i = 0; i < n_all; ++i) {
        k(i, i) += 2.0 * s;
        const Eigen::Index j = (i + 1) % n_all;
        k(i, j) -= s;
        k(j, i) -= s;
    }
    return {std::move(k), profile.eps, boundary};
}

// Lowest `count` modes with omega^2 > 0 of K Phi = omega^2 M Phi, scaled to
// the discrete normalisation and signed so the first sample above 1e-8 of
// the peak is positive. Eigenvalues within 1e-9 of zero (the uniform
// periodic mode) are skipped.
inline ModeBasis solve_modes(const Eigenproblem& prob, std::size_t count, const SpatialGrid& grid) {
    const Eigen::Index n = prob.stiffness.rows();
    const VectorXd inv_sqrt_m = prob.mass.cwiseSqrt().cwiseInverse();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    if (prob.boundary == Boundary::pec) {
        VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
        for (Eigen::Index i = 0; i < n; ++i) diag(i) = prob.stiffness(i, i) * inv_sqrt_m(i) * inv_sqrt_m(i);
        for (Eigen::Index i = 0; i + 1 < n; ++i)
            sub(i) = prob.stiffness(i + 1, i) * inv_sqrt_m(i) * inv_sqrt_m(i + 1);
        es.computeFromTridiagonal(diag, sub);
    } else {
        es.compute(inv_sqrt_m.asDiagonal() * prob.stiffness * inv_sqrt_m.asDiagonal());
    }
    if (es.info() != Eigen::Success) throw NumericError("mode eigensolver did not converge");

    const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    std::vector<Eigen::Index> picked;
    for (Eigen::Index i = 0; i < n && picked.size() < count; ++i) {
        const double lam = es.eigenvalues()(i);
        if (lam < -1e-9 * scale) {
            std::ostringstream msg;
            msg << "discretization error: negative generalized eigenvalue " << lam;
            throw NumericError(msg.str());
        }
        if (lam <= 1e-9 * scale) continue;
        picked.push_back(i);
    }
    if (picked.size() < count) throw ConfigError("grid too coarse for the requested mode count");

    const auto n_all = static_cast<Eigen::Index>(grid.size());
    const Eigen::Index offset = prob.boundary == Boundary::pec ? 1 : 0;
    const double norm = std::sqrt(grid.length() / grid.spacing());
    MatrixXd phi = MatrixXd::Zero(n_all, static_cast<Eigen::Index>(count));
    std::vector<double> freq;
    for (std::size_t c = 0; c < count; ++c) {
        const Eigen::Index i = picked[c];
        freq.push_back(std::sqrt(es.eigenvalues()(i)));
        phi.col(static_cast<Eigen::Index>(c)).segment(offset, n) =
            norm * inv_sqrt_m.cwiseProduct(es.eigenvectors().col(i));
    }
    atom::apply_sign_convention(phi);
    VectorXd eps = VectorXd::Ones(n_all);
    eps.segment(offset, n) = prob.mass;
    if (prob.boundary == Boundary::pec) {
        eps(0) = eps(1);
        eps(n_all - 1) = eps(n_all - 2);
    }
    return ModeBasis(prob.boundary, grid, std::move(freq), std::move(phi), std::move(eps),
                     std::vector<ModeShape>(count, ModeShape::numerical), std::vector<double>(count, 0.0));
}

// ||K Phi_k - omega_k^2 M Phi_k|| / ||K Phi_k|| for mode k.
inline double eigen_residual(const Eigenproblem& prob, const ModeBasis& basis, std::size_t k) {
    const Eigen::Index offset = prob.boundary == Boundary::pec ? 1 : 0;
    const VectorXd v = basis.eigenfunctions().col(static_cast<Eigen::Index>(k)).segment(offset, prob.stiffness.rows());
    const VectorXd kv = prob.stiffness * v;
    const double w2 = basis.frequency(k) * basis.frequency(k);
    return (kv - w2 * prob.mass.cwiseProduct(v)).norm() / kv.norm();
}

struct Couplings {
    double omega_a{1.0};
    std::vector<double> omega;  // mode frequencies
    std::vector<double> g_d;    // dipole gauge
    std::vector<double> g_c;    // Coulomb gauge, g_d * omega_a / omega
    std::vector<bool> coupled;

    std::size_t size() const { return omega.size(); }

    std::vector<std::size_t> coupled_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < coupled.size(); ++k)
            if (coupled[k]) out.push_back(k);
        return out;
    }

    // Couplings restricted to the given mode indices.
    Couplings subset(const std::vector<std::size_t>& idx) const {
        Couplings out;
        out.omega_a = omega_a;
        for (auto k : idx) {
            out.omega.push_back(omega[k]);
            out.g_d.push_back(g_d[k]);
            out.g_c.push_back(g_c[k]);
            out.coupled.push_back(coupled[k]);
        }
        return out;
    }

    // Every coupling multiplied by s.
    Couplings scaled(double s) const {
        Couplings out = *this;
        for (auto& g : out.g_d) g *= s;
        for (auto& g : out.g_c) g *= s;
        return out;
    }
};

// Couplings from raw mode data: g_D,k = d A_k sqrt(omega_k / 2L).
inline Couplings make_couplings(double omega_a, double length, const std::vector<double>& omega,
                                const std::vector<double>& amplitude, double dipole) {
    Couplings c;
    c.omega_a = omega_a;
    c.omega = omega;
    double gmax = 0.0;
    for (std::size_t k = 0; k < omega.size(); ++k) {
        const double gd = dipole * amplitude[k] * std::sqrt(omega[k] / (2.0 * length));
        c.g_d.push_back(gd);
        c.g_c.push_back(gd * omega_a / omega[k]);
        gmax = std::max(gmax, std::abs(gd));
    }
    for (double gd : c.g_d) c.coupled.push_back(gmax > 0.0 && std::abs(gd) > 1e-12 * gmax);
    return c;
}

inline Couplings coupling_coefficients(const ModeBasis& basis, const TwoLevelAtom& atom) {
    if (!basis.grid().contains(atom.position)) {
        std::ostringstream msg;
        msg << "configuration error: atom position " << atom.position << " outside the cavity";
        throw ConfigError(msg.str());
    }
    std::vector<double> amp(basis.size());
    // modes are normalised to (1/L) int eps A^2 = 1, so O(1) is the amplitude scale;
    // round-off at a node is not a coupling
    for (std::size_t k = 0; k < basis.size(); ++k) {
        amp[k] = basis.value(k, atom.position);
        if (std::abs(amp[k]) < 1e-12) amp[k] = 0.0;
    }
    return make_couplings(atom.omega_a, basis.grid().length(), basis.frequencies(), amp, atom.dipole);
}

// Returns the atom with its dipole scaled so that g_D / omega = target_ratio
// on the lowest-frequency coupled mode.
inline TwoLevelAtom calibrate_dipole(const ModeBasis& basis, TwoLevelAtom atom, double target_ratio) {
    TwoLevelAtom unit = atom;
    unit.dipole = 1.0;
    const auto c = coupling_coefficients(basis, unit);
    const auto idx = c.coupled_indices();
    if (idx.empty()) throw ConfigError("calibration error: every coupling vanishes at the atom position");
    const std::size_t k = idx.front();
    atom.dipole = target_ratio * c.omega[k] / c.g_d[k];
    return atom;
}

}  // namespace cavityqed::modes
