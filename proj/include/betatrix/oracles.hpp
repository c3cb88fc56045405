#pragma once

// Independent reference computations used to cross-check the fast paths:
// dense inverse iteration for eigenvector first rows and a finite-difference
// Jacobian of the bidiagonal-to-tridiagonal map.

#include <Eigen/Dense>

#include <cmath>
#include <span>
#include <vector>

#include "betatrix/ensembles.hpp"
#include "betatrix/matrix.hpp"

namespace betatrix {

/// |first component| of each unit eigenvector, by inverse iteration on the
/// dense matrix shifted to the given eigenvalue approximations.
inline std::vector<double> inverse_iteration_first_row(const TridiagonalSym& t, std::span<const double> lambda,
                                                       int iterations = 4) {
    const Eigen::MatrixXd dense = t.dense();
    const auto n = dense.rows();
    const double scale = std::max(1.0, t.gershgorin_bound());
    std::vector<double> out;
    out.reserve(lambda.size());
    for (double mu : lambda) {
        Eigen::MatrixXd shifted = dense;
        // an exactly singular shift would stall the LU; nudge by a few ulps
        shifted.diagonal().array() -= mu + 8.0 * std::numeric_limits<double>::epsilon() * scale;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
        Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
        for (int it = 0; it < iterations; ++it)
            v = lu.solve(v).normalized();
        out.push_back(std::abs(v(0)));
    }
    return out;
}

/// Maps the bidiagonal entries (diag then subdiag) to the entries of B B^T
/// (diag then subdiag).
inline Eigen::VectorXd bidiagonal_to_tridiagonal_entries(const Eigen::VectorXd& xy, std::size_t m) {
    BidiagonalPos b;
    b.diag.assign(xy.data(), xy.data() + m);
    b.subdiag.assign(xy.data() + m, xy.data() + 2 * m - 1);
    const TridiagonalSym t = laguerre_from_factor(b);
    Eigen::VectorXd out(2 * m - 1);
    for (std::size_t i = 0; i < m; ++i)
        out(static_cast<Eigen::Index>(i)) = t.diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i)
        out(static_cast<Eigen::Index>(m + i)) = t.subdiag[i];
    return out;
}

/// |det| of the central-difference Jacobian of (x, y) -> (a, b).
inline double finite_difference_b_to_t_determinant(const BidiagonalPos& b, double rel_step = 1e-5) {
    const std::size_t m = b.size();
    const auto dim = static_cast<Eigen::Index>(2 * m - 1);
    Eigen::VectorXd xy(dim);
    for (std::size_t i = 0; i < m; ++i)
        xy(static_cast<Eigen::Index>(i)) = b.diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i)
        xy(static_cast<Eigen::Index>(m + i)) = b.subdiag[i];

    Eigen::MatrixXd jac(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        const double h = rel_step * std::max(1.0, std::abs(xy(k)));
        Eigen::VectorXd up = xy, down = xy;
        up(k) += h;
        down(k) -= h;
        jac.col(k) = (bidiagonal_to_tridiagonal_entries(up, m) - bidiagonal_to_tridiagonal_entries(down, m)) /
                     (2.0 * h);
    }
    return std::abs(jac.determinant());
}

} // namespace betatrix
