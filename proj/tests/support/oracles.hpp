#pragma once

// Test-only oracles. These deliberately use naive, independent computations
// (trapezoid rule, explicit loops, normal equations) so they cannot share a
// bug with the library paths they check.

#include <Eigen/Dense>
#include <vector>

#include "fplsr/basis.hpp"

namespace oracles {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

// Trapezoid-rule approximation of the basis-derivative product integrals.
inline Eigen::MatrixXd trapezoid_product_integrals(const fplsr::BasisSystem& bs, int deriv,
                                                   int n_points) {
    const auto grid = linspace(bs.a, bs.b, n_points);
    const Eigen::MatrixXd E = fplsr::eval_basis(bs, grid, deriv);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n_points, (bs.b - bs.a) / (n_points - 1));
    w(0) *= 0.5;
    w(n_points - 1) *= 0.5;
    return E.transpose() * w.asDiagonal() * E;
}

// Same grid, one Richardson step over the nested half-resolution trapezoid
// sum. Needed when the target tolerance sits below the plain rule's own
// O(h^2) discretization error (which for clamped bases concentrates at
// entries touching the boundary, where the integrand has nonzero slope).
inline Eigen::MatrixXd trapezoid_product_integrals_refined(const fplsr::BasisSystem& bs, int deriv,
                                                           int n_points) {
    // n_points odd so every other fine node forms the coarse grid.
    const Eigen::MatrixXd fine = trapezoid_product_integrals(bs, deriv, n_points);
    const Eigen::MatrixXd coarse = trapezoid_product_integrals(bs, deriv, (n_points + 1) / 2);
    return (4.0 * fine - coarse) / 3.0;
}

// Value of basis function i by the textbook two-term recursion on the full
// clamped knot vector, with 0/0 := 0 and the last span closed on the right.
inline double coxdeboor_value(const std::vector<double>& knots, int i, int order, double x) {
    if (order == 1) {
        const double b = knots.back();
        if (knots[i] <= x && x < knots[i + 1]) return 1.0;
        if (x == b && knots[i + 1] == b && knots[i] < b) return 1.0;
        return 0.0;
    }
    double left = 0.0, right = 0.0;
    const double dl = knots[i + order - 1] - knots[i];
    if (dl > 0.0) left = (x - knots[i]) / dl * coxdeboor_value(knots, i, order - 1, x);
    const double dr = knots[i + order] - knots[i + 1];
    if (dr > 0.0) right = (knots[i + order] - x) / dr * coxdeboor_value(knots, i + 1, order - 1, x);
    return left + right;
}

// Curve values as an explicit per-point, per-basis summation.
inline Eigen::MatrixXd pointwise_curve_values(const fplsr::BasisSystem& bs,
                                              const Eigen::MatrixXd& coef,
                                              const std::vector<double>& grid) {
    Eigen::MatrixXd out(coef.rows(), static_cast<Eigen::Index>(grid.size()));
    for (Eigen::Index i = 0; i < coef.rows(); ++i)
        for (size_t g = 0; g < grid.size(); ++g) {
            double v = 0.0;
            for (int k = 0; k < bs.n_basis; ++k)
                v += coef(i, k) * coxdeboor_value(bs.knots, k, bs.order, grid[g]);
            out(i, static_cast<Eigen::Index>(g)) = v;
        }
    return out;
}

// Least-squares coefficients of Y on X (both centered internally) via the
// normal equations. Throws on a numerically singular cross-product matrix.
inline Eigen::MatrixXd least_squares_centered(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
    const Eigen::MatrixXd Yc = Y.rowwise() - Y.colwise().mean();
    return (Xc.transpose() * Xc).ldlt().solve(Xc.transpose() * Yc);
}

// Dominant left singular vector of S by plain power iteration on S*S^T.
inline Eigen::VectorXd dominant_left_singular(const Eigen::MatrixXd& S) {
    const Eigen::MatrixXd G = S * S.transpose();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(S.rows()).normalized();
    for (int it = 0; it < 5000; ++it) {
        Eigen::VectorXd next = (G * v).normalized();
        if ((next - v).norm() < 1e-14) { v = next; break; }
        v = next;
    }
    return v;
}

// Mean squared difference of two curve sets evaluated on a shared grid,
// written as the obvious double loop.
inline double double_loop_amse(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        double sse = 0.0;
        for (Eigen::Index g = 0; g < A.cols(); ++g) {
            const double d = A(i, g) - B(i, g);
            sse += d * d;
        }
        total += sse / static_cast<double>(A.cols());
    }
    return total / static_cast<double>(A.rows());
}

}  // namespace oracles
