// hamiltonians.hpp — dense atom x Fock Hamiltonians in the Coulomb and dipole gauges
//
// Basis ordering: atom level (slowest) then mode 1 .. mode M, Fock index of
// the last mode fastest. Two-level operators use |g> = 0, |e> = 1:
//   sz = diag(-1, 1), sx = [[0,1],[1,0]], sy = i(s- - s+) = [[0,i],[-i,0]].
// Zero-point energies are dropped everywhere.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cavityqed/atom.hpp"
#include "cavityqed/chainmap.hpp"
#include "cavityqed/errors.hpp"
#include "cavityqed/fock.hpp"
#include "cavityqed/linalg.hpp"
#include "cavityqed/modes.hpp"

namespace cavityqed::ham {

using atom::AtomSpectrum;
using atom::TwoLevelAtom;
using chain::ChainTransform;
using modes::Couplings;

enum class Variant { full_C, full_D, rabi_C_direct, rabi_D_direct, rabi_C_proper, rabi_D_proper, chain };

inline std::string to_string(Variant v) {
    switch (v) {
        case Variant::full_C: return "full_C";
        case Variant::full_D: return "full_D";
        case Variant::rabi_C_direct: return "rabi_C_direct";
        case Variant::rabi_D_direct: return "rabi_D_direct";
        case Variant::rabi_C_proper: return "rabi_C_proper";
        case Variant::rabi_D_proper: return "rabi_D_proper";
        case Variant::chain: return "chain";
    }
    return "?";
}

inline Variant variant_from_string(const std::string& s) {
    for (Variant v : {Variant::full_C, Variant::full_D, Variant::rabi_C_direct, Variant::rabi_D_direct,
                      Variant::rabi_C_proper, Variant::rabi_D_proper, Variant::chain})
        if (to_string(v) == s) return v;
    throw ConfigError("unknown Hamiltonian variant '" + s + "'");
}

namespace pauli {
inline MatrixXcd sz() { return (MatrixXcd(2, 2) << -1, 0, 0, 1).finished(); }
inline MatrixXcd sx() { return (MatrixXcd(2, 2) << 0, 1, 1, 0).finished(); }
inline MatrixXcd sy() { return (MatrixXcd(2, 2) << 0, kI, -kI, 0).finished(); }
inline MatrixXcd sminus() { return (MatrixXcd(2, 2) << 0, 1, 0, 0).finished(); }
inline MatrixXcd excited() { return (MatrixXcd(2, 2) << 0, 0, 0, 1).finished(); }
}  // namespace pauli

struct BuildOptions {
    // Uncoupled modes commute with everything else; keep them out of the
    // dense matrix and add their ladders back in spectrum_gaps.
    bool split_uncoupled{true};
    bool drop_self_energy{false};  // rabi_D_proper only
    std::size_t max_dim{6000};
};

struct DenseHamiltonian {
    MatrixXcd matrix;
    Variant variant{Variant::rabi_D_proper};
    std::size_t atom_dim{2};
    FockTruncation field;                // modes kept in the matrix
    std::vector<double> spectators;      // frequencies of modes left out
    std::size_t spectator_cutoff{2};
    double omega_ref{1.0};               // fundamental mode frequency, gap unit

    std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

namespace detail {

struct Layout {
    Couplings active;
    std::vector<double> spectators;
    FockTruncation field;
    double omega_ref{1.0};
};

inline Layout layout(const Couplings& c, const FockTruncation& trunc, const BuildOptions& opt) {
    trunc.validate();
    if (trunc.modes != c.size()) {
        std::ostringstream msg;
        msg << "truncation has " << trunc.modes << " modes but couplings have " << c.size();
        throw DimensionError(msg.str());
    }
    Layout out;
    out.omega_ref = *std::min_element(c.omega.begin(), c.omega.end());
    auto idx = c.coupled_indices();
    if (!opt.split_uncoupled || trunc.max_total || idx.empty()) {
        idx.resize(c.size());
        for (std::size_t k = 0; k < c.size(); ++k) idx[k] = k;
    } else {
        for (std::size_t k = 0; k < c.size(); ++k)
            if (!c.coupled[k]) out.spectators.push_back(c.omega[k]);
    }
    out.active = c.subset(idx);
    out.field = FockTruncation{idx.size(), trunc.cutoff, trunc.max_total};
    return out;
}

inline void check_capacity(std::size_t atom_dim, const FockSpace& fs, std::size_t max_dim) {
    const std::size_t d = atom_dim * fs.dim();
    if (d > max_dim) {
        std::ostringstream msg;
        msg << "dense Hamiltonian dimension " << d << " (" << atom_dim << " atom levels x " << fs.dim()
            << " Fock states) exceeds the limit " << max_dim
            << "; lower the photon cutoff, the mode count, or the atom levels, or raise max_dense_dim";
        throw CapacityError(msg.str());
    }
}

inline MatrixXcd dense(const SparseReal& s) { return MatrixXd(s).cast<cplx>(); }

inline DenseHamiltonian finish(MatrixXcd m, Variant v, std::size_t atom_dim, const Layout& lay) {
    DenseHamiltonian h;
    h.matrix = std::move(m);
    h.variant = v;
    h.atom_dim = atom_dim;
    h.field = lay.field;
    h.spectators = lay.spectators;
    h.spectator_cutoff = lay.field.cutoff;
    h.omega_ref = lay.omega_ref;
    return h;
}

// Atom-level data shared by the full builders: energies measured from E0 and
// x relative to x_ge, both over the first n levels.
struct AtomBlock {
    VectorXd energies;
    MatrixXd x_rel;
    double x_ge{0.0};
};

inline AtomBlock atom_block(const AtomSpectrum& spec, std::size_t n, double omega_a) {
    if (n < 2) throw ConfigError("full Hamiltonians need at least two atom levels");
    if (n > spec.levels()) {
        std::ostringstream msg;
        msg << "requested " << n << " atom levels but the spectrum holds " << spec.levels();
        throw ConfigError(msg.str());
    }
    AtomBlock b;
    const MatrixXd x = spec.position_matrix(n);
    b.x_ge = x(0, 1);
    if (std::abs(b.x_ge) < 1e-14) throw NumericError("vanishing ground-excited dipole matrix element");
    b.x_rel = x / b.x_ge;
    b.energies = spec.energies.head(static_cast<Eigen::Index>(n)).array() - spec.energies(0);
    const double gap = b.energies(1);
    if (std::abs(gap - omega_a) > 1e-8 * omega_a) {
        std::ostringstream msg;
        msg << "atom spectrum gap " << gap << " differs from omega_a " << omega_a
            << "; rescale the spectrum first";
        throw ConfigError(msg.str());
    }
    return b;
}

}  // namespace detail

// sum_k g_k (a_k + a_k^+) on the given Fock space.
inline SparseReal field_quadrature(const FockSpace& fs, const std::vector<double>& g) { return fs.quadrature(g); }

inline DenseHamiltonian build_rabi_coulomb_direct(const Couplings& c, const FockTruncation& trunc,
                                                  const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(2, fs, opt.max_dim);
    const auto& a = lay.active;
    const SparseReal xc = fs.quadrature(a.g_c);
    const MatrixXcd field = detail::dense(fs.free_field(a.omega) + SparseReal(xc * xc) / a.omega_a);
    const MatrixXcd id = MatrixXcd::Identity(fs.dim(), fs.dim());
    MatrixXcd h = kron(0.5 * a.omega_a * pauli::sz(), id) + kron(MatrixXcd::Identity(2, 2), field) +
                  kron(pauli::sy(), detail::dense(xc));
    return detail::finish(std::move(h), Variant::rabi_C_direct, 2, lay);
}

// (1/w_a) X_C^2, X_C = sum_k g_C,k (a_k + a_k^+), on the coupled-mode Fock space.
inline MatrixXcd diamagnetic_term(const Couplings& c, const FockTruncation& trunc, const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    const SparseReal xc = fs.quadrature(lay.active.g_c);
    return detail::dense(SparseReal(xc * xc)) / lay.active.omega_a;
}

// Projected self-energy matrix P x^2 P / x_ge^2 from the first n atom levels.
inline Eigen::Matrix2d projected_x2(const AtomSpectrum& spec, std::size_t n_levels) {
    if (n_levels < 10) throw ConfigError("the projected self-energy needs at least 10 atom levels");
    if (n_levels > spec.levels()) throw ConfigError("projected self-energy asks for more levels than the spectrum holds");
    const MatrixXd x = spec.position_matrix(n_levels);
    const MatrixXd x2 = x * x / (x(0, 1) * x(0, 1));
    return x2.topLeftCorner<2, 2>();
}

inline DenseHamiltonian build_rabi_dipole_direct(const AtomSpectrum& spec, const Couplings& c,
                                                 const FockTruncation& trunc, std::size_t n_atom_levels = 40,
                                                 const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(2, fs, opt.max_dim);
    const auto& a = lay.active;
    const Eigen::Matrix2d p = projected_x2(spec, n_atom_levels);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.g_d[k] * a.g_d[k] / a.omega[k];
    const MatrixXcd id = MatrixXcd::Identity(fs.dim(), fs.dim());
    MatrixXcd atom_part = 0.5 * a.omega_a * pauli::sz() + s * p.cast<cplx>();
    MatrixXcd h = kron(atom_part, id) + kron(MatrixXcd::Identity(2, 2), detail::dense(fs.free_field(a.omega))) +
                  kron(-kI * pauli::sx(), detail::dense(fs.antiquadrature(a.g_d)));
    return detail::finish(std::move(h), Variant::rabi_D_direct, 2, lay);
}

inline DenseHamiltonian build_rabi_dipole_proper(const Couplings& c, const FockTruncation& trunc,
                                                 const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(2, fs, opt.max_dim);
    const auto& a = lay.active;
    const MatrixXcd id = MatrixXcd::Identity(fs.dim(), fs.dim());
    MatrixXcd h = kron(0.5 * a.omega_a * pauli::sz(), id) +
                  kron(MatrixXcd::Identity(2, 2), detail::dense(fs.free_field(a.omega))) +
                  kron(-kI * pauli::sx(), detail::dense(fs.antiquadrature(a.g_d)));
    if (!opt.drop_self_energy) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += a.g_d[k] * a.g_d[k] / a.omega[k];
        h.diagonal().array() += s;
    }
    return detail::finish(std::move(h), Variant::rabi_D_proper, 2, lay);
}

// X~ = sum_k (2 g_D,k / w_k)(a_k + a_k^+); cos and sin from its eigendecomposition.
inline DenseHamiltonian build_rabi_coulomb_proper(const Couplings& c, const FockTruncation& trunc,
                                                  const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(2, fs, opt.max_dim);
    const auto& a = lay.active;
    std::vector<double> coef(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) coef[k] = 2.0 * a.g_d[k] / a.omega[k];
    const MatrixXd xt = MatrixXd(fs.quadrature(coef));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(xt);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver failed on the field quadrature");
    const MatrixXd& v = es.eigenvectors();
    const MatrixXcd cosx = (v * es.eigenvalues().array().cos().matrix().asDiagonal() * v.transpose()).cast<cplx>();
    const MatrixXcd sinx = (v * es.eigenvalues().array().sin().matrix().asDiagonal() * v.transpose()).cast<cplx>();
    MatrixXcd h = kron(MatrixXcd::Identity(2, 2), detail::dense(fs.free_field(a.omega))) +
                  0.5 * a.omega_a * (kron(pauli::sz(), cosx) + kron(pauli::sy(), sinx));
    return detail::finish(std::move(h), Variant::rabi_C_proper, 2, lay);
}

// Same operator assembled as W (w_a/2 sz) W^+ + H_F with
// W = exp(i sx sum_k (g_D,k / w_k)(a_k + a_k^+)).
inline DenseHamiltonian build_rabi_coulomb_conjugated(const Couplings& c, const FockTruncation& trunc,
                                                      const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(2, fs, opt.max_dim);
    const auto& a = lay.active;
    std::vector<double> coef(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) coef[k] = a.g_d[k] / a.omega[k];
    const MatrixXcd gen = kron(pauli::sx(), detail::dense(fs.quadrature(coef)));
    const MatrixXcd w = hermitian_function(gen, [](double e) { return std::exp(kI * e); });
    const MatrixXcd id = MatrixXcd::Identity(fs.dim(), fs.dim());
    MatrixXcd h = w * kron(0.5 * a.omega_a * pauli::sz(), id) * w.adjoint() +
                  kron(MatrixXcd::Identity(2, 2), detail::dense(fs.free_field(a.omega)));
    h = 0.5 * (h + h.adjoint()).eval();
    return detail::finish(std::move(h), Variant::rabi_C_proper, 2, lay);
}

// Multilevel dipole gauge: H_A + H_F - i sum_k g_D,k X (a_k - a_k^+) + sum_k (g_D,k^2 / w_k) X^2,
// with X = x / x_ge over the retained levels.
inline DenseHamiltonian build_full_dipole(const AtomSpectrum& spec, const Couplings& c, const FockTruncation& trunc,
                                          std::size_t n_atom_levels = 40, const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(n_atom_levels, fs, opt.max_dim);
    const auto& a = lay.active;
    const auto blk = detail::atom_block(spec, n_atom_levels, a.omega_a);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.g_d[k] * a.g_d[k] / a.omega[k];
    const auto na = static_cast<Eigen::Index>(n_atom_levels);
    MatrixXcd atom_part = (MatrixXd(blk.energies.asDiagonal()) + s * blk.x_rel * blk.x_rel).cast<cplx>();
    MatrixXcd h = kron(atom_part, MatrixXcd::Identity(fs.dim(), fs.dim())) +
                  kron(MatrixXcd::Identity(na, na), detail::dense(fs.free_field(a.omega))) +
                  kron(-kI * blk.x_rel.cast<cplx>(), detail::dense(fs.antiquadrature(a.g_d)));
    return detail::finish(std::move(h), Variant::full_D, n_atom_levels, lay);
}

// Multilevel Coulomb gauge: H_A + H_F - (q/m) p A + (q^2/2m) A^2, where
// <m|p|n> = i m (E_m - E_n) <m|x|n> and q A = X_C / (x_ge w_a).
inline DenseHamiltonian build_full_coulomb(const AtomSpectrum& spec, const Couplings& c, const FockTruncation& trunc,
                                           std::size_t n_atom_levels = 40, const BuildOptions& opt = {}) {
    const auto lay = detail::layout(c, trunc, opt);
    const FockSpace fs(lay.field);
    detail::check_capacity(n_atom_levels, fs, opt.max_dim);
    const auto& a = lay.active;
    const auto blk = detail::atom_block(spec, n_atom_levels, a.omega_a);
    const auto na = static_cast<Eigen::Index>(n_atom_levels);
    MatrixXcd pa(na, na);
    for (Eigen::Index m = 0; m < na; ++m)
        for (Eigen::Index n = 0; n < na; ++n)
            pa(m, n) = -kI * (blk.energies(m) - blk.energies(n)) / a.omega_a * blk.x_rel(m, n);
    const SparseReal xc = fs.quadrature(a.g_c);
    const double dia = 1.0 / (2.0 * spec.mass * a.omega_a * a.omega_a * blk.x_ge * blk.x_ge);
    const MatrixXcd field = detail::dense(fs.free_field(a.omega) + dia * SparseReal(xc * xc));
    MatrixXcd h = kron(MatrixXd(blk.energies.asDiagonal()).cast<cplx>(), MatrixXcd::Identity(fs.dim(), fs.dim())) +
                  kron(MatrixXcd::Identity(na, na), field) + kron(pa, detail::dense(xc));
    return detail::finish(std::move(h), Variant::full_C, n_atom_levels, lay);
}

// w_a/2 sz - i rho sx (b_1 - b_1^+) + sum_n xi_n b_n^+ b_n + t_n (b_n^+ b_{n+1} + h.c.)
inline DenseHamiltonian build_chain_dense(const TwoLevelAtom& atom, const ChainTransform& ch,
                                          const FockTruncation& trunc, const BuildOptions& opt = {}) {
    trunc.validate();
    if (trunc.modes != ch.length()) {
        std::ostringstream msg;
        msg << "truncation has " << trunc.modes << " modes but the chain has " << ch.length() << " sites";
        throw DimensionError(msg.str());
    }
    const FockSpace fs(trunc);
    detail::check_capacity(2, fs, opt.max_dim);
    SparseReal field = fs.free_field(ch.xi);
    for (std::size_t n = 0; n + 1 < ch.length(); ++n) {
        const SparseReal hop = SparseReal(fs.annihilation(n).transpose()) * fs.annihilation(n + 1);
        field += ch.t[n] * (hop + SparseReal(hop.transpose()));
    }
    std::vector<double> lead(ch.length(), 0.0);
    lead[0] = ch.rho;
    const MatrixXcd id = MatrixXcd::Identity(fs.dim(), fs.dim());
    MatrixXcd h = kron(0.5 * atom.omega_a * pauli::sz(), id) + kron(MatrixXcd::Identity(2, 2), detail::dense(field)) +
                  kron(-kI * pauli::sx(), detail::dense(fs.antiquadrature(lead)));
    DenseHamiltonian out;
    out.matrix = std::move(h);
    out.variant = Variant::chain;
    out.field = trunc;
    out.spectator_cutoff = trunc.cutoff;
    out.omega_ref = ch.xi.empty() ? 1.0 : *std::min_element(ch.xi.begin(), ch.xi.end());
    return out;
}

// Lowest eigenvalues of the dense matrix merged with the ladders of the
// spectator modes (each with N - 1 photons at most).
inline VectorXd lowest_levels(const DenseHamiltonian& h, std::size_t n_levels) {
    if (n_levels == 0) throw ConfigError("need at least one level");
    const VectorXd ev = hermitian_eigenvalues(h.matrix);
    std::vector<double> levels(ev.data(), ev.data() + std::min<Eigen::Index>(ev.size(), static_cast<Eigen::Index>(n_levels)));
    for (double w : h.spectators) {
        std::vector<double> merged;
        for (double e : levels)
            for (std::size_t n = 0; n < h.spectator_cutoff; ++n) merged.push_back(e + static_cast<double>(n) * w);
        std::sort(merged.begin(), merged.end());
        merged.resize(std::min(merged.size(), n_levels));
        levels = std::move(merged);
    }
    if (levels.size() < n_levels) throw ConfigError("requested more levels than the truncated space holds");
    return Eigen::Map<VectorXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));
}

// (E_i - E_0) / w_1 for the lowest n_levels states.
inline VectorXd spectrum_gaps(const DenseHamiltonian& h, std::size_t n_levels) {
    const VectorXd e = lowest_levels(h, n_levels);
    return (e.array() - e(0)) / h.omega_ref;
}

struct CutoffResult {
    std::size_t cutoff{0};
    VectorXd gaps;
    bool converged{false};
};

// Raises N from `start` in steps of `step` until the lowest n_levels gaps
// move by less than tol between successive cutoffs, or N exceeds `max`.
inline CutoffResult converge_cutoff(const std::function<DenseHamiltonian(std::size_t)>& build, std::size_t n_levels,
                                    std::size_t start = 6, std::size_t step = 2, std::size_t max = 12,
                                    double tol = 1e-6) {
    CutoffResult r;
    r.cutoff = start;
    r.gaps = spectrum_gaps(build(start), n_levels);
    for (std::size_t n = start + step; n <= max; n += step) {
        VectorXd next = spectrum_gaps(build(n), n_levels);
        const double move = (next - r.gaps).cwiseAbs().maxCoeff();
        r.cutoff = n;
        r.gaps = std::move(next);
        if (move < tol) {
            r.converged = true;
            break;
        }
    }
    return r;
}

struct TrkTerm {
    Eigen::Matrix2cd sum_rule;  // sum_n B_n^+ B_n / (w n), B_n = <n|(d.E)|0>
    Eigen::Matrix2cd expected;  // (g_D^2 / w) sx^2
};

// Per-mode second-order sum of the dipole coupling over photon states,
// evaluated in a single-mode Fock space with the given cutoff.
inline std::vector<TrkTerm> trk_selfenergy_check(const Couplings& c, std::size_t cutoff) {
    const FockSpace fs(FockTruncation{1, cutoff, std::nullopt});
    const MatrixXd aa = MatrixXd(fs.antiquadrature({1.0}));
    const Eigen::Matrix2cd sx = pauli::sx();
    std::vector<TrkTerm> out;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const MatrixXcd op = kron(-kI * c.g_d[k] * pauli::sx(), aa.cast<cplx>());
        TrkTerm t;
        t.sum_rule.setZero();
        for (std::size_t n = 1; n < cutoff; ++n) {
            Eigen::Matrix2cd b;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    b(i, j) = op(static_cast<Eigen::Index>(i * cutoff + n), static_cast<Eigen::Index>(j * cutoff));
            t.sum_rule += b.adjoint() * b / (c.omega[k] * static_cast<double>(n));
        }
        t.expected = (c.g_d[k] * c.g_d[k] / c.omega[k]) * sx * sx;
        out.push_back(t);
    }
    return out;
}

}  // namespace cavityqed::ham
