// mps.hpp — matrix product states for the atom + boson chain and TEBD evolution
//
// Site 0 is the atom (dimension 2), sites 1..M_c the chain oscillators
// (dimension N). A site tensor A[l][p][r] is stored row-major as a
// (dl*d, dr) matrix, so the same buffer reads as (dl, d*dr).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#ifdef CAVITYQED_USE_LAPACKE
#ifndef lapack_complex_double
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>
#endif

#include "cavityqed/atom.hpp"
#include "cavityqed/chainmap.hpp"
#include "cavityqed/errors.hpp"
#include "cavityqed/linalg.hpp"

namespace cavityqed::mps {

using RMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::Index;

struct TruncationPolicy {
    std::size_t max_bond{32};
    double svd_cutoff{1e-10};  // discarded weight allowed per bond, relative to the bond's total weight
    bool use_randomized_svd{false};
    // Dominant subspace from the Hermitian eigenproblem of theta theta^+
    // (or theta^+ theta). Used only with a positive cutoff: eigenvalues carry
    // ~1e-16 absolute error, far below any kept weight.
    bool use_gram{true};
    std::uint64_t seed{0};

    void validate() const {
        if (max_bond < 1) throw ConfigError("max_bond must be >= 1");
        if (!(svd_cutoff >= 0.0 && svd_cutoff < 1.0)) throw ConfigError("svd_cutoff must lie in [0, 1)");
    }
};

struct Svd {
    MatrixXcd u;  // rows x k
    VectorXd s;   // descending
    MatrixXcd v;  // cols x k, A = u diag(s) v^+
};

inline Svd svd_thin(const MatrixXcd& a) {
#ifdef CAVITYQED_USE_LAPACKE
    {
        const auto m = static_cast<lapack_int>(a.rows());
        const auto n = static_cast<lapack_int>(a.cols());
        const lapack_int k = std::min(m, n);
        MatrixXcd work = a;
        Svd out{MatrixXcd(m, k), VectorXd(k), MatrixXcd()};
        MatrixXcd vt(k, n);
        const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.s.data(),
                                               out.u.data(), m, vt.data(), k);
        if (info == 0) {
            out.v = vt.adjoint();
            return out;
        }
    }
#endif
    Eigen::BDCSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericError("SVD did not converge");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Halko-Martinsson-Tropp range finder with two power iterations; rank
// is capped at `rank` + 10 oversampling columns.
inline Svd svd_randomized(const MatrixXcd& a, std::size_t rank, std::mt19937_64& rng) {
    const Index k = std::min<Index>(static_cast<Index>(rank) + 10, std::min(a.rows(), a.cols()));
    if (k >= std::min(a.rows(), a.cols())) return svd_thin(a);
    std::normal_distribution<double> gauss;
    MatrixXcd omega(a.cols(), k);
    for (Index j = 0; j < k; ++j)
        for (Index i = 0; i < a.cols(); ++i) omega(i, j) = cplx(gauss(rng), gauss(rng));
    auto orth = [k](const MatrixXcd& y) {
        Eigen::HouseholderQR<MatrixXcd> qr(y);
        return MatrixXcd(qr.householderQ() * MatrixXcd::Identity(y.rows(), k));
    };
    MatrixXcd q = orth(a * omega);
    for (int it = 0; it < 2; ++it) {
        const MatrixXcd z = orth(a.adjoint() * q);
        q = orth(a * z);
    }
    const MatrixXcd b = q.adjoint() * a;
    Svd small = svd_thin(b);
    return {q * small.u, small.s, small.v};
}

// Number of singular values to keep and the weight they leave behind.
struct Cut {
    Index keep{1};
    double discarded{0.0};
};

// `complete` means s holds every singular value; the discarded weight is then
// the dropped tail itself rather than total - kept, which would accumulate
// round-off on every untruncated bond.
inline Cut choose_cut(const VectorXd& s, double total_weight, const TruncationPolicy& p, bool complete = true) {
    const Index n = s.size();
    if (n == 0) return {0, 0.0};
    Index keep = n;
    if (p.svd_cutoff == 0.0) {
        const double floor = 1e-15 * s(0);
        while (keep > 1 && s(keep - 1) <= floor) --keep;
        if (static_cast<std::size_t>(keep) > p.max_bond) {
            std::ostringstream msg;
            msg << "bond dimension " << keep << " exceeds max_bond " << p.max_bond
                << " with truncation disabled; raise max_bond or set a positive svd_cutoff";
            throw CapacityError(msg.str());
        }
    } else {
        double tail = 0.0;
        while (keep > 1 && tail + s(keep - 1) * s(keep - 1) <= p.svd_cutoff * total_weight) {
            tail += s(keep - 1) * s(keep - 1);
            --keep;
        }
        keep = std::min<Index>(keep, static_cast<Index>(p.max_bond));
    }
    if (complete) return {keep, s.tail(n - keep).squaredNorm()};
    return {keep, std::max(0.0, total_weight - s.head(keep).squaredNorm())};
}

class MpsState {
public:
    struct Site {
        Index dl{1}, d{1}, dr{1};
        RMatrix m;  // (dl*d, dr)

        Eigen::Map<const RMatrix, 0, Eigen::OuterStride<>> slice(Index p) const {
            return {m.data() + p * dr, dl, dr, Eigen::OuterStride<>(d * dr)};
        }
    };

    MpsState() = default;
    explicit MpsState(std::vector<Site> sites) : sites_(std::move(sites)), center_(kUnknown) { check(); }

    // Product state from normalised local vectors.
    static MpsState product(const std::vector<VectorXcd>& local) {
        std::vector<Site> sites;
        for (const auto& v : local) {
            Site s{1, v.size(), 1, RMatrix(v.size(), 1)};
            s.m.col(0) = v;
            sites.push_back(std::move(s));
        }
        MpsState out(std::move(sites));
        out.center_ = 0;
        return out;
    }

    std::size_t size() const { return sites_.size(); }
    const Site& site(std::size_t i) const { return sites_[i]; }
    Index phys(std::size_t i) const { return sites_[i].d; }
    std::size_t center() const { return center_; }
    bool has_center() const { return center_ != kUnknown; }

    std::vector<std::size_t> bond_dims() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i + 1 < sites_.size(); ++i) out.push_back(static_cast<std::size_t>(sites_[i].dr));
        return out;
    }

    std::size_t max_bond() const {
        std::size_t b = 1;
        for (auto d : bond_dims()) b = std::max(b, d);
        return b;
    }

    // Full state vector, site 0 slowest.
    VectorXcd to_vector() const {
        RMatrix c = RMatrix::Ones(1, 1);
        for (const auto& s : sites_) {
            const Eigen::Map<const RMatrix> wide(s.m.data(), s.dl, s.d * s.dr);
            RMatrix next = c * wide;
            c = Eigen::Map<RMatrix>(next.data(), next.rows() * s.d, s.dr);
        }
        return Eigen::Map<const VectorXcd>(c.data(), c.size());
    }

    double norm() const {
        if (has_center()) return sites_[center_].m.norm();
        return std::sqrt(std::max(0.0, overlap(*this).real()));
    }

    // <this|other>
    cplx overlap(const MpsState& other) const {
        if (other.size() != size()) throw DimensionError("overlap of MPS with different lengths");
        MatrixXcd env = MatrixXcd::Ones(1, 1);
        for (std::size_t i = 0; i < size(); ++i) {
            const Site& a = sites_[i];
            const Site& b = other.sites_[i];
            if (a.d != b.d) throw DimensionError("overlap of MPS with different physical dimensions");
            MatrixXcd next = MatrixXcd::Zero(a.dr, b.dr);
            for (Index p = 0; p < a.d; ++p) next.noalias() += a.slice(p).adjoint() * env * b.slice(p);
            env = std::move(next);
        }
        return env(0, 0);
    }

    // Full left/right orthonormalisation around `c`.
    void canonicalize(std::size_t c) {
        if (c >= size()) throw DimensionError("canonical center out of range");
        for (std::size_t i = 0; i < c; ++i) shift_right(i);
        for (std::size_t i = size() - 1; i > c; --i) shift_left(i);
        center_ = c;
    }

    void move_center(std::size_t c) {
        if (!has_center()) {
            canonicalize(c);
            return;
        }
        while (center_ < c) shift_right(center_++);
        while (center_ > c) shift_left(center_--);
    }

    // Applies a two-site gate on (i, i+1) and truncates the bond. The
    // canonical center ends on i+1 when `center_right`, else on i.
    // Returns the discarded weight.
    double apply_two_site(std::size_t i, const MatrixXcd& gate, const TruncationPolicy& policy, bool center_right,
                          std::mt19937_64* rng = nullptr) {
        if (i + 1 >= size()) throw DimensionError("two-site gate beyond the chain end");
        if (!has_center() || (center_ != i && center_ != i + 1)) move_center(center_right ? i : i + 1);
        Site& a = sites_[i];
        Site& b = sites_[i + 1];
        const Index d1 = a.d, d2 = b.d, dl = a.dl, dr = b.dr;
        if (gate.rows() != d1 * d2 || gate.cols() != d1 * d2)
            throw DimensionError("gate does not match the two-site physical dimension");
        const Eigen::Map<const RMatrix> bw(b.m.data(), b.dl, d2 * dr);
        RMatrix theta = a.m * bw;  // (dl*d1, d2*dr) == [l][p1][p2][r]
        RMatrix block(d1 * d2, dr);
        for (Index l = 0; l < dl; ++l) {
            Eigen::Map<RMatrix> tl(theta.data() + l * d1 * d2 * dr, d1 * d2, dr);
            block.noalias() = gate * tl;
            tl = block;
        }
        const MatrixXcd tm = theta;
        const double total = tm.squaredNorm();
        MatrixXcd left, right;
        Cut cut;
        if (policy.use_gram && !policy.use_randomized_svd && policy.svd_cutoff > 0.0) {
            const MatrixXcd gram = center_right ? MatrixXcd(tm * tm.adjoint()) : MatrixXcd(tm.adjoint() * tm);
            Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
            if (es.info() != Eigen::Success) throw NumericError("bond eigensolver did not converge");
            const VectorXd s = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
            cut = choose_cut(s, total, policy);
            const MatrixXcd vecs = es.eigenvectors().rowwise().reverse().leftCols(cut.keep);
            if (center_right) {
                left = vecs;
                right = vecs.adjoint() * tm;
            } else {
                left = tm * vecs;
                right = vecs.adjoint();
            }
        } else {
            Svd f = (policy.use_randomized_svd && rng) ? svd_randomized(tm, policy.max_bond, *rng) : svd_thin(tm);
            cut = choose_cut(f.s, total, policy, !(policy.use_randomized_svd && rng));
            left = f.u.leftCols(cut.keep);
            right = f.v.leftCols(cut.keep).adjoint();
            if (center_right)
                right = f.s.head(cut.keep).asDiagonal() * right;
            else
                left = left * f.s.head(cut.keep).asDiagonal();
        }
        const Index k = cut.keep;
        a.dr = k;
        a.m = left;
        b.dl = k;
        RMatrix rr = right;
        b.m = Eigen::Map<RMatrix>(rr.data(), k * d2, dr);
        center_ = center_right ? i + 1 : i;
        return cut.discarded;
    }

    // <psi| O_site |psi>, no normalisation.
    cplx expectation(const MatrixXcd& op, std::size_t site) const {
        if (site >= size()) throw DimensionError("site index out of range");
        if (op.rows() != phys(site) || op.cols() != phys(site))
            throw DimensionError("operator does not match the site dimension");
        MatrixXcd env = MatrixXcd::Ones(1, 1);
        for (std::size_t i = 0; i < size(); ++i) env = transfer(env, i, i == site ? &op : nullptr);
        return env(0, 0);
    }

    // <psi| X_m^+ X_m' |psi> over sites first..first+count-1, X given as the
    // single-site annihilator; returns the count x count Hermitian matrix.
    MatrixXcd two_point(const MatrixXcd& x, std::size_t first, std::size_t count) const {
        if (first + count > size()) throw DimensionError("two-point range beyond the chain end");
        const MatrixXcd xd = x.adjoint();
        const MatrixXcd nx = xd * x;
        std::vector<MatrixXcd> right(size() + 1);
        right[size()] = MatrixXcd::Ones(1, 1);
        for (std::size_t i = size(); i-- > 0;) right[i] = transfer_right(right[i + 1], i, nullptr);
        MatrixXcd out = MatrixXcd::Zero(static_cast<Index>(count), static_cast<Index>(count));
        MatrixXcd left = MatrixXcd::Ones(1, 1);
        for (std::size_t i = 0; i < first; ++i) left = transfer(left, i, nullptr);
        for (std::size_t a = 0; a < count; ++a) {
            const std::size_t m = first + a;
            out(static_cast<Index>(a), static_cast<Index>(a)) =
                transfer(left, m, &nx).cwiseProduct(right[m + 1]).sum();
            MatrixXcd open = transfer(left, m, &xd);
            for (std::size_t b = a + 1; b < count; ++b) {
                const std::size_t mp = first + b;
                const cplx v = transfer(open, mp, &x).cwiseProduct(right[mp + 1]).sum();
                out(static_cast<Index>(a), static_cast<Index>(b)) = v;
                out(static_cast<Index>(b), static_cast<Index>(a)) = std::conj(v);
                open = transfer(open, mp, nullptr);
            }
            left = transfer(left, m, nullptr);
        }
        return out;
    }

private:
    static constexpr std::size_t kUnknown = std::numeric_limits<std::size_t>::max();

    void check() const {
        if (sites_.empty()) throw DimensionError("an MPS needs at least one site");
        if (sites_.front().dl != 1 || sites_.back().dr != 1) throw DimensionError("boundary bonds must have dimension 1");
        for (std::size_t i = 0; i < sites_.size(); ++i) {
            const Site& s = sites_[i];
            if (s.m.rows() != s.dl * s.d || s.m.cols() != s.dr) throw DimensionError("site tensor shape mismatch");
            if (i + 1 < sites_.size() && s.dr != sites_[i + 1].dl) throw DimensionError("bond dimensions do not chain");
        }
    }

    // env'(b', b) = sum conj(A(a',p',b')) env(a',a) O(p',p) A(a,p,b)
    MatrixXcd transfer(const MatrixXcd& env, std::size_t i, const MatrixXcd* op) const {
        const Site& s = sites_[i];
        MatrixXcd out = MatrixXcd::Zero(s.dr, s.dr);
        if (!op) {
            for (Index p = 0; p < s.d; ++p) out.noalias() += s.slice(p).adjoint() * (env * s.slice(p));
            return out;
        }
        std::vector<MatrixXcd> ea(static_cast<std::size_t>(s.d));
        for (Index p = 0; p < s.d; ++p) ea[static_cast<std::size_t>(p)] = env * s.slice(p);
        for (Index q = 0; q < s.d; ++q) {
            MatrixXcd acc = MatrixXcd::Zero(env.rows(), s.dr);
            bool any = false;
            for (Index p = 0; p < s.d; ++p) {
                if ((*op)(q, p) == cplx(0.0)) continue;
                acc += (*op)(q, p) * ea[static_cast<std::size_t>(p)];
                any = true;
            }
            if (any) out.noalias() += s.slice(q).adjoint() * acc;
        }
        return out;
    }

    // env'(a', a) = sum conj(A(a',p',b')) O(p',p) A(a,p,b) env(b',b)
    MatrixXcd transfer_right(const MatrixXcd& env, std::size_t i, const MatrixXcd* op) const {
        const Site& s = sites_[i];
        MatrixXcd out = MatrixXcd::Zero(s.dl, s.dl);
        for (Index q = 0; q < s.d; ++q)
            for (Index p = 0; p < s.d; ++p) {
                const cplx o = op ? (*op)(q, p) : (q == p ? cplx(1.0) : cplx(0.0));
                if (o == cplx(0.0)) continue;
                out.noalias() += o * (s.slice(q).conjugate() * env * s.slice(p).transpose());
            }
        return out;
    }

    // QR on site i, R pushed into site i+1.
    void shift_right(std::size_t i) {
        Site& a = sites_[i];
        Site& b = sites_[i + 1];
        const MatrixXcd mat = a.m;
        const Index k = std::min(mat.rows(), mat.cols());
        Eigen::HouseholderQR<MatrixXcd> qr(mat);
        MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(mat.rows(), k);
        MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        const Eigen::Map<const RMatrix> bw(b.m.data(), b.dl, b.d * b.dr);
        RMatrix nb = r * bw;
        a.m = q;
        a.dr = k;
        b.dl = k;
        b.m = Eigen::Map<RMatrix>(nb.data(), k * b.d, b.dr);
    }

    // LQ on site i (as dl x d*dr), L pushed into site i-1.
    void shift_left(std::size_t i) {
        Site& a = sites_[i - 1];
        Site& b = sites_[i];
        const MatrixXcd wide = Eigen::Map<const RMatrix>(b.m.data(), b.dl, b.d * b.dr);
        const MatrixXcd tall = wide.adjoint();
        const Index k = std::min(tall.rows(), tall.cols());
        Eigen::HouseholderQR<MatrixXcd> qr(tall);
        MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(tall.rows(), k);
        MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        RMatrix nb = q.adjoint();  // (k, d*dr)
        b.m = Eigen::Map<RMatrix>(nb.data(), k * b.d, b.dr);
        b.dl = k;
        a.m = a.m * r.adjoint();
        a.dr = k;
    }

    std::vector<Site> sites_;
    std::size_t center_{kUnknown};
};

// |g or e> x |0> ... |0> with M_c oscillators of dimension N.
inline MpsState product_state(bool excited, std::size_t chain_sites, std::size_t n_photons) {
    if (chain_sites < 1) throw ConfigError("product state needs at least one chain site");
    if (n_photons < 2) throw ConfigError("photon cutoff must be >= 2");
    std::vector<VectorXcd> local;
    VectorXcd a = VectorXcd::Zero(2);
    a(excited ? 1 : 0) = 1.0;
    local.push_back(a);
    VectorXcd vac = VectorXcd::Zero(static_cast<Index>(n_photons));
    vac(0) = 1.0;
    for (std::size_t i = 0; i < chain_sites; ++i) local.push_back(vac);
    return MpsState::product(local);
}

inline MatrixXcd annihilator(std::size_t n) {
    MatrixXcd b = MatrixXcd::Zero(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t k = 1; k < n; ++k) b(static_cast<Index>(k - 1), static_cast<Index>(k)) = std::sqrt(static_cast<double>(k));
    return b;
}

// Bond Hamiltonians with every on-site term absorbed into the bond on its
// left; site 0's term goes into bond (0, 1).
inline std::vector<MatrixXcd> bond_hamiltonians(const atom::TwoLevelAtom& atom, const chain::ChainTransform& ch,
                                                std::size_t n_photons) {
    const auto n = static_cast<Index>(n_photons);
    const MatrixXcd b = annihilator(n_photons);
    const MatrixXcd num = b.adjoint() * b;
    const MatrixXcd id = MatrixXcd::Identity(n, n);
    MatrixXcd sz(2, 2), sx(2, 2);
    sz << -1, 0, 0, 1;
    sx << 0, 1, 1, 0;
    std::vector<MatrixXcd> out;
    out.push_back(kron(0.5 * atom.omega_a * sz, id) + kron(MatrixXcd::Identity(2, 2), ch.xi[0] * num) +
                  kron(-kI * ch.rho * sx, b - b.adjoint()));
    for (std::size_t s = 1; s < ch.length(); ++s) {
        const MatrixXcd hop = kron(b.adjoint(), b);
        out.push_back(ch.t[s - 1] * (hop + hop.adjoint()) + kron(id, ch.xi[s] * num));
    }
    return out;
}

struct GateSet {
    std::vector<MatrixXcd> full;  // exp(-i h dt) per bond
    std::vector<MatrixXcd> half;  // exp(-i h dt/2), filled for second order only
    double dt{0.0};
    bool second_order{false};
};

inline GateSet build_gates(const atom::TwoLevelAtom& atom, const chain::ChainTransform& ch, double dt,
                           std::size_t n_photons, bool second_order = false) {
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
    GateSet g;
    g.dt = dt;
    g.second_order = second_order;
    for (const auto& h : bond_hamiltonians(atom, ch, n_photons)) {
        g.full.push_back(unitary_propagator(h, dt));
        if (second_order) g.half.push_back(unitary_propagator(h, 0.5 * dt));
    }
    return g;
}

struct StepReport {
    std::vector<double> discarded;  // per gate application
    double total() const {
        double s = 0.0;
        for (double d : discarded) s += d;
        return s;
    }
};

// One Trotter step: odd bonds (1,2), (3,4), ... left to right, then even
// bonds (0,1), (2,3), ... right to left. Second order wraps the even sweep
// in two half-step odd sweeps.
inline StepReport tebd_step(MpsState& state, const GateSet& gates, const TruncationPolicy& policy,
                            std::mt19937_64* rng = nullptr) {
    const std::size_t bonds = gates.full.size();
    if (bonds + 1 != state.size()) throw DimensionError("gate set does not match the MPS length");
    StepReport rep;
    auto odd = [&](const std::vector<MatrixXcd>& g) {
        for (std::size_t n = 1; n < bonds; n += 2) rep.discarded.push_back(state.apply_two_site(n, g[n], policy, true, rng));
    };
    auto even = [&](const std::vector<MatrixXcd>& g) {
        std::size_t n = (bonds - 1) % 2 == 0 ? bonds - 1 : bonds - 2;
        for (;;) {
            rep.discarded.push_back(state.apply_two_site(n, g[n], policy, false, rng));
            if (n < 2) break;
            n -= 2;
        }
    };
    if (gates.second_order) {
        odd(gates.half);
        even(gates.full);
        odd(gates.half);
    } else {
        odd(gates.full);
        even(gates.full);
    }
    return rep;
}

// <sigma+ sigma->
inline double excited_population(const MpsState& state) {
    MatrixXcd p = MatrixXcd::Zero(2, 2);
    p(1, 1) = 1.0;
    return state.expectation(p, 0).real();
}

// B_mm' = <b_m^+ b_m'> over the chain sites.
inline MatrixXcd correlation_matrix(const MpsState& state) {
    if (state.size() < 2) throw DimensionError("state has no chain sites");
    return state.two_point(annihilator(static_cast<std::size_t>(state.phys(1))), 1, state.size() - 1);
}

}  // namespace cavityqed::mps
