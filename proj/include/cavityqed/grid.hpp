// grid.hpp — uniform 1D sampling grids for atoms and cavities

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cavityqed/errors.hpp"

namespace cavityqed {

enum class Boundary { periodic, pec };

inline std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "pec"; }

// Samples x_j = -L/2 + j*dx, j = 0..n-1. Bounded grids include both
// endpoints (dx = L/(n-1)); periodic grids omit the right endpoint (dx = L/n).
class SpatialGrid {
public:
    SpatialGrid(double length, std::size_t n_points, Boundary boundary = Boundary::pec)
        : length_(length), n_(n_points), boundary_(boundary) {
        if (n_points < 3) throw ConfigError("spatial grid needs at least 3 points");
        if (!(length > 0.0)) throw ConfigError("spatial grid length must be positive");
    }

    double length() const { return length_; }
    std::size_t size() const { return n_; }
    Boundary boundary() const { return boundary_; }
    double spacing() const {
        return boundary_ == Boundary::periodic ? length_ / static_cast<double>(n_)
                                               : length_ / static_cast<double>(n_ - 1);
    }
    double left() const { return -0.5 * length_; }
    double x(std::size_t j) const { return left() + static_cast<double>(j) * spacing(); }

    std::vector<double> points() const {
        std::vector<double> out(n_);
        for (std::size_t j = 0; j < n_; ++j) out[j] = x(j);
        return out;
    }

    bool contains(double pos, double tol = 1e-12) const {
        return pos >= left() - tol * length_ && pos <= -left() + tol * length_;
    }

private:
    double length_;
    std::size_t n_;
    Boundary boundary_;
};

}  // namespace cavityqed
