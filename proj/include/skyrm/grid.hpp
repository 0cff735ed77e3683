#pragma once
#include <Eigen/Dense>

#include "skyrm/errors.hpp"

namespace skyrm {

// Sign-symmetric coordinate grid with endpoints: x_k = x_max*(2k-(M-1))/(M-1).
// The numerator is an exact integer, so x(M-1-k) == -x(k) bitwise; odd/even
// integrand cancellations (orthogonality of the analytic mode pair) then hold
// to machine precision.
struct ModeGrid {
    int m = 0;
    double x_max = 1.0;

    ModeGrid() = default;
    ModeGrid(int m_, double x_max_ = 1.0) : m(m_), x_max(x_max_) {
        if (m < 3) throw DimensionMismatch("ModeGrid requires M >= 3");
        if (x_max <= 0) throw DimensionMismatch("ModeGrid requires x_max > 0");
    }

    double x(int k) const { return x_max * double(2 * k - (m - 1)) / double(m - 1); }

    Eigen::VectorXd samples() const {
        Eigen::VectorXd v(m);
        for (int k = 0; k < m; ++k) v[k] = x(k);
        return v;
    }

    double spacing() const { return 2.0 * x_max / double(m - 1); }

    bool operator==(const ModeGrid& o) const { return m == o.m && x_max == o.x_max; }
};

} // namespace skyrm
