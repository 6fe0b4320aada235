// atom.hpp — Fourier grid Hamiltonian atom and its two-level reduction
//
// Natural units hbar = c = eps0 = 1. The untruncated atom is a single
// charge in a 1D binding potential, discretised with the Fourier grid
// Hamiltonian (spectral kinetic operator on an odd, centred grid).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "cavityqed/errors.hpp"
#include "cavityqed/grid.hpp"

namespace cavityqed::atom {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class PotentialKind { double_well, harmonic, custom_samples };

struct Potential {
    PotentialKind kind{PotentialKind::double_well};
    // double_well: V = -a x^2 + b x^4; harmonic: V = k x^2 / 2.
    double a{0.0};
    double b{0.0};
    double stiffness{0.0};
    // custom_samples: linear interpolation of (x, V) pairs, x ascending.
    std::vector<double> sample_x;
    std::vector<double> sample_v;

    static Potential double_well(double a, double b) {
        Potential p;
        p.kind = PotentialKind::double_well;
        p.a = a;
        p.b = b;
        return p;
    }
    static Potential harmonic(double stiffness) {
        Potential p;
        p.kind = PotentialKind::harmonic;
        p.stiffness = stiffness;
        return p;
    }
    static Potential custom(std::vector<double> xs, std::vector<double> vs) {
        if (xs.size() != vs.size() || xs.size() < 2)
            throw ConfigError("custom potential needs at least two (x, V) samples of equal length");
        if (!std::is_sorted(xs.begin(), xs.end()))
            throw ConfigError("custom potential sample positions must be ascending");
        Potential p;
        p.kind = PotentialKind::custom_samples;
        p.sample_x = std::move(xs);
        p.sample_v = std::move(vs);
        return p;
    }

    double operator()(double x) const {
        switch (kind) {
            case PotentialKind::double_well:
                return -a * x * x + b * x * x * x * x;
            case PotentialKind::harmonic:
                return 0.5 * stiffness * x * x;
            case PotentialKind::custom_samples: {
                if (x <= sample_x.front()) return sample_v.front();
                if (x >= sample_x.back()) return sample_v.back();
                auto it = std::upper_bound(sample_x.begin(), sample_x.end(), x);
                const auto i = static_cast<std::size_t>(it - sample_x.begin());
                const double w = (x - sample_x[i - 1]) / (sample_x[i] - sample_x[i - 1]);
                return (1.0 - w) * sample_v[i - 1] + w * sample_v[i];
            }
        }
        return 0.0;
    }

    double minimum() const {
        switch (kind) {
            case PotentialKind::double_well:
                return a > 0.0 && b > 0.0 ? -a * a / (4.0 * b) : 0.0;
            case PotentialKind::harmonic:
                return 0.0;
            case PotentialKind::custom_samples:
                return *std::min_element(sample_v.begin(), sample_v.end());
        }
        return 0.0;
    }
};

struct AtomSpectrum {
    VectorXd energies;       // ascending
    MatrixXd wavefunctions;  // column n is psi_n on the grid, sum psi^2 dx = 1
    SpatialGrid grid;
    double mass{1.0};

    std::size_t levels() const { return static_cast<std::size_t>(energies.size()); }

    // <m|x|n> by grid quadrature over the first `n` levels.
    MatrixXd position_matrix(std::size_t n) const {
        n = std::min(n, levels());
        const auto xs = grid.points();
        const Eigen::Map<const VectorXd> xv(xs.data(), static_cast<Eigen::Index>(xs.size()));
        const auto psi = wavefunctions.leftCols(static_cast<Eigen::Index>(n));
        return psi.transpose() * xv.asDiagonal() * psi * grid.spacing();
    }

    MatrixXd overlap_matrix() const {
        return wavefunctions.transpose() * wavefunctions * grid.spacing();
    }
};

struct TwoLevelAtom {
    double omega_a{1.0};
    double dipole{0.0};
    double position{0.0};
};

inline void require_fgh_grid(const SpatialGrid& grid) {
    if (grid.size() < 33 || grid.size() % 2 == 0) {
        std::ostringstream msg;
        msg << "invalid grid: Fourier grid Hamiltonian needs an odd point count >= 33, got "
            << grid.size();
        throw ConfigError(msg.str());
    }
}

// p^2/2m + V(x) in the grid basis; kinetic part from the Fourier sum over
// the n = (N-1)/2 positive wavenumbers of an N-point box.
inline MatrixXd build_fgh_hamiltonian(const Potential& potential, const SpatialGrid& grid,
                                      double mass) {
    require_fgh_grid(grid);
    if (!(mass > 0.0)) throw ConfigError("particle mass must be positive");
    const auto n_pts = static_cast<Eigen::Index>(grid.size());
    const double dx = grid.spacing();
    const double box = static_cast<double>(n_pts) * dx;
    const Eigen::Index n_half = (n_pts - 1) / 2;

    VectorXd by_distance(n_pts);
    for (Eigen::Index d = 0; d < n_pts; ++d) {
        double acc = 0.0;
        for (Eigen::Index l = 1; l <= n_half; ++l) {
            const double k = 2.0 * std::numbers::pi * static_cast<double>(l) / box;
            acc += std::cos(2.0 * std::numbers::pi * static_cast<double>(l * d) /
                            static_cast<double>(n_pts)) *
                   k * k / (2.0 * mass);
        }
        by_distance(d) = 2.0 * acc / static_cast<double>(n_pts);
    }

    MatrixXd h(n_pts, n_pts);
    for (Eigen::Index i = 0; i < n_pts; ++i) {
        for (Eigen::Index j = 0; j < n_pts; ++j) h(i, j) = by_distance(std::abs(i - j));
        const double v = potential(grid.x(static_cast<std::size_t>(i)));
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "invalid potential: non-finite value at x = " << grid.x(static_cast<std::size_t>(i));
            throw ConfigError(msg.str());
        }
        h(i, i) += v;
    }
    return h;
}

// Flip each column so that its first sample above 1e-8 of its peak is positive.
inline void apply_sign_convention(MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        const double peak = vectors.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, c)) > 1e-8 * peak) {
                if (vectors(r, c) < 0.0) vectors.col(c) *= -1.0;
                break;
            }
        }
    }
}

inline AtomSpectrum diagonalize_atom(const MatrixXd& h, const SpatialGrid& grid,
                                     std::size_t n_levels, double mass = 1.0) {
    if (n_levels == 0 || n_levels > grid.size())
        throw ConfigError("n_levels must lie in [1, grid size]");
    if (h.rows() != static_cast<Eigen::Index>(grid.size()) || h.cols() != h.rows())
        throw DimensionError("Hamiltonian shape does not match the grid");
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    if (es.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "atom eigensolver failed to converge (residual norm "
            << (h * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal()).norm()
            << ")";
        throw NumericError(msg.str());
    }
    const auto n = static_cast<Eigen::Index>(n_levels);
    MatrixXd psi = es.eigenvectors().leftCols(n) / std::sqrt(grid.spacing());
    apply_sign_convention(psi);
    return AtomSpectrum{es.eigenvalues().head(n), std::move(psi), grid, mass};
}

// Energies divided by E1 - E0 so the two-level gap is the unit frequency.
// Position matrix elements are unchanged, so the mass absorbs the scale:
// H/s = p^2 / (2 m s) + V/s.
inline AtomSpectrum rescale_to_unit_gap(AtomSpectrum spec) {
    if (spec.levels() < 2) throw ConfigError("rescaling needs at least two levels");
    const double gap = spec.energies(1) - spec.energies(0);
    if (!(gap > 0.0)) throw NumericError("degenerate lowest pair, cannot rescale");
    spec.energies /= gap;
    spec.mass *= gap;
    return spec;
}

inline TwoLevelAtom reduce_to_two_level(const AtomSpectrum& spec, double charge, double position) {
    if (spec.levels() < 2) throw ConfigError("two-level reduction needs at least two levels");
    const double gap = spec.energies(1) - spec.energies(0);
    const double scale = std::max(1.0, std::abs(spec.energies(1)));
    if (gap < 1e-10 * scale) throw NumericError("degeneracy: E1 - E0 below tolerance");
    const auto xs = spec.grid.points();
    double x_ge = 0.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
        x_ge += spec.wavefunctions(static_cast<Eigen::Index>(j), 0) * xs[j] *
                spec.wavefunctions(static_cast<Eigen::Index>(j), 1);
    x_ge *= spec.grid.spacing();
    return TwoLevelAtom{gap, charge * x_ge, position};
}

// Grid sized for the lowest `n_levels` states: the highest level's outer
// turning point plus six of its shortest de Broglie wavelengths on each
// side, sampled at eight points per wavelength. Two passes: the first
// estimates E_max on a coarse grid.
inline SpatialGrid default_atom_grid(const Potential& potential, double mass, std::size_t n_levels,
                                     std::size_t max_points = 2001) {
    auto turning_point = [&](double energy) {
        double x = 1e-3;
        while (potential(x) < energy || potential(-x) < energy) {
            x *= 1.05;
            if (x > 1e6) throw ConfigError("potential does not confine the requested levels");
        }
        return x;
    };
    auto sized = [&](double e_max) {
        const double v_min = potential.minimum();
        const double p_max = std::sqrt(2.0 * mass * std::max(e_max - v_min, 1e-12));
        const double wavelength = 2.0 * std::numbers::pi / p_max;
        const double half = turning_point(e_max) + 6.0 * wavelength;
        auto n = static_cast<std::size_t>(std::ceil(2.0 * half / (wavelength / 8.0))) + 1;
        n = std::clamp<std::size_t>(n, 65, max_points);
        if (n % 2 == 0) ++n;
        return SpatialGrid(2.0 * half, n);
    };
    // Coarse pass: harmonic-like estimate around the well bottom.
    double e_guess = potential.minimum() + 1.0;
    SpatialGrid grid = sized(e_guess);
    for (int pass = 0; pass < 3; ++pass) {
        const auto h = build_fgh_hamiltonian(potential, grid, mass);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
        const auto idx = static_cast<Eigen::Index>(std::min(n_levels, grid.size()) - 1);
        const double e_max = es.eigenvalues()(idx);
        SpatialGrid next = sized(e_max);
        if (next.size() == grid.size() && std::abs(next.length() - grid.length()) < 1e-9 * grid.length())
            break;
        grid = next;
    }
    return grid;
}

inline double anharmonicity(const VectorXd& energies) {
    return (energies(2) - energies(1)) / (energies(1) - energies(0));
}

struct DoubleWellCalibration {
    Potential potential;
    SpatialGrid grid;
    double ratio{0.0};
};

// Bisects the quadratic coefficient a of V = -a x^2 + x^4 (unit mass) until
// (E2 - E1)/(E1 - E0) reaches `target_ratio` to within 1e-6.
inline DoubleWellCalibration calibrate_double_well(double target_ratio, std::size_t n_levels = 40) {
    if (!(target_ratio > 1.0)) throw ConfigError("anharmonicity target must exceed 1");
    auto ratio_for = [&](double a) {
        const auto pot = Potential::double_well(a, 1.0);
        const auto grid = default_atom_grid(pot, 1.0, 3, 401);
        const auto h = build_fgh_hamiltonian(pot, grid, 1.0);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
        return anharmonicity(es.eigenvalues());
    };
    double lo = 0.0, hi = 1.0;
    while (ratio_for(hi) < target_ratio) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e3) throw NumericError("double-well calibration did not bracket the target");
    }
    for (int it = 0; it < 80 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio_for(mid) < target_ratio ? lo : hi) = mid;
    }
    const auto pot = Potential::double_well(hi, 1.0);
    auto grid = default_atom_grid(pot, 1.0, n_levels);
    const auto h = build_fgh_hamiltonian(pot, grid, 1.0);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return DoubleWellCalibration{pot, grid, anharmonicity(es.eigenvalues())};
}

// Default atom for spectra runs: calibrated double well, diagonalised and
// rescaled so that E1 - E0 = 1.
inline AtomSpectrum default_double_well_spectrum(double target_ratio, std::size_t n_levels) {
    const auto cal = calibrate_double_well(target_ratio, n_levels);
    const auto h = build_fgh_hamiltonian(cal.potential, cal.grid, 1.0);
    return rescale_to_unit_gap(diagonalize_atom(h, cal.grid, n_levels, 1.0));
}

}  // namespace cavityqed::atom
