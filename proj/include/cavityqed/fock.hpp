// fock.hpp — truncated multimode Fock spaces and ladder operators

#pragma once

#include <Eigen/Sparse>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "cavityqed/errors.hpp"

namespace cavityqed {

using SparseReal = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// M modes with Fock states 0..N-1 each. An optional cap on the total photon
// number keeps only states with sum n_k <= max_total; that truncation is
// invariant under orthogonal mixing of the modes, the per-mode one is not.
struct FockTruncation {
    std::size_t modes{1};
    std::size_t cutoff{2};  // N
    std::optional<std::size_t> max_total;

    void validate() const {
        if (modes < 1) throw ConfigError("Fock truncation needs at least one mode");
        if (cutoff < 2) throw ConfigError("photon cutoff must be >= 2");
    }
};

class FockSpace {
public:
    explicit FockSpace(const FockTruncation& trunc) : trunc_(trunc) {
        trunc.validate();
        std::vector<int> n(trunc.modes, 0);
        for (;;) {
            std::size_t total = 0;
            for (int v : n) total += static_cast<std::size_t>(v);
            if (!trunc.max_total || total <= *trunc.max_total) {
                index_.emplace(encode(n), states_.size());
                states_.push_back(n);
            }
            // odometer, last mode fastest
            std::size_t k = trunc.modes;
            while (k > 0) {
                --k;
                if (++n[k] < static_cast<int>(trunc.cutoff)) break;
                n[k] = 0;
                if (k == 0) return;
            }
        }
    }

    std::size_t modes() const { return trunc_.modes; }
    std::size_t cutoff() const { return trunc_.cutoff; }
    std::size_t dim() const { return states_.size(); }
    const FockTruncation& truncation() const { return trunc_; }
    const std::vector<int>& state(std::size_t i) const { return states_[i]; }

    std::optional<std::size_t> find(const std::vector<int>& n) const {
        const auto it = index_.find(encode(n));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // a_k; entries leaving the truncated space are dropped.
    SparseReal annihilation(std::size_t k) const {
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t i = 0; i < states_.size(); ++i) {
            const auto& n = states_[i];
            if (n[k] == 0) continue;
            auto m = n;
            --m[k];
            if (auto j = find(m)) t.emplace_back(static_cast<int>(*j), static_cast<int>(i), std::sqrt(n[k]));
        }
        SparseReal a(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        a.setFromTriplets(t.begin(), t.end());
        return a;
    }

    SparseReal number(std::size_t k) const {
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t i = 0; i < states_.size(); ++i)
            if (states_[i][k] != 0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), states_[i][k]);
        SparseReal n(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        n.setFromTriplets(t.begin(), t.end());
        return n;
    }

    // sum_k w_k a_k^dagger a_k
    SparseReal free_field(const std::vector<double>& omega) const {
        std::vector<Eigen::Triplet<double>> t;
        for (std::size_t i = 0; i < states_.size(); ++i) {
            double e = 0.0;
            for (std::size_t k = 0; k < trunc_.modes; ++k) e += omega[k] * states_[i][k];
            if (e != 0.0) t.emplace_back(static_cast<int>(i), static_cast<int>(i), e);
        }
        SparseReal h(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        h.setFromTriplets(t.begin(), t.end());
        return h;
    }

    // sum_k c_k (a_k + a_k^dagger)
    SparseReal quadrature(const std::vector<double>& c) const {
        SparseReal x(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        for (std::size_t k = 0; k < trunc_.modes; ++k) {
            if (c[k] == 0.0) continue;
            const SparseReal a = annihilation(k);
            x += c[k] * (a + SparseReal(a.transpose()));
        }
        return x;
    }

    // sum_k c_k (a_k - a_k^dagger)
    SparseReal antiquadrature(const std::vector<double>& c) const {
        SparseReal x(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
        for (std::size_t k = 0; k < trunc_.modes; ++k) {
            if (c[k] == 0.0) continue;
            const SparseReal a = annihilation(k);
            x += c[k] * (a - SparseReal(a.transpose()));
        }
        return x;
    }

private:
    std::size_t encode(const std::vector<int>& n) const {
        std::size_t code = 0;
        for (int v : n) code = code * trunc_.cutoff + static_cast<std::size_t>(v);
        return code;
    }

    FockTruncation trunc_;
    std::vector<std::vector<int>> states_;
    std::unordered_map<std::size_t, std::size_t> index_;
};

}  // namespace cavityqed
