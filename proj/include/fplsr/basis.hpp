#pragma once

// B-spline basis systems: construction, evaluation (Cox-de Boor with
// derivatives), Gram and roughness-penalty matrices, and symmetric PSD
// matrix square roots.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fplsr/error.hpp"

namespace fplsr {

/// A B-spline basis of `order` (degree order-1) on [a,b] with clamped
/// boundary knots. n_basis = #interior_knots + order.
struct BasisSystem {
    int order = 4;
    double a = 0.0;
    double b = 1.0;
    std::vector<double> interior_knots;
    int n_basis = 0;
    std::vector<double> knots;  // full clamped vector, length n_basis + order

    bool operator==(const BasisSystem&) const = default;
};

/// Gram matrix of pairwise L2 inner products of the basis functions,
/// tagged with the basis that produced it.
struct GramMatrix {
    Eigen::MatrixXd values;
    BasisSystem basis;
};

/// Symmetric square root M^{1/2} and inverse root M^{-1/2} of a PSD matrix.
struct SqrtPair {
    Eigen::MatrixXd sqrt;
    Eigen::MatrixXd inv_sqrt;
    double condition = 1.0;
};

namespace detail {

// Nodes/weights of n-point Gauss-Legendre quadrature on [-1,1].
// Newton iteration on the Legendre recurrence; deterministic.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[n - 1 - i] = weights[i];
    }
}

// Knot span index i such that knots[i] <= x < knots[i+1], restricted to the
// nonempty spans [order-1, n_basis-1]; x == b maps to the last span.
inline int find_span(const BasisSystem& bs, double x) {
    const int p = bs.order;
    const int K = bs.n_basis;
    if (x >= bs.knots[K]) return K - 1;  // knots[K] == b
    const auto first = bs.knots.begin() + p;
    const auto last = bs.knots.begin() + K;
    return static_cast<int>(std::upper_bound(first, last, x) - bs.knots.begin()) - 1;
}

// Values (and derivatives up to nderiv) of the `order` basis functions that
// are nonzero on the span containing x. ders is (nderiv+1) x order; the
// first nonzero basis index is span - order + 1. Cox-de Boor recursion with
// the derivative table of the classic DersBasisFuns algorithm.
inline void ders_basis(const BasisSystem& bs, int span, double x, int nderiv,
                       Eigen::MatrixXd& ders) {
    const int pdeg = bs.order - 1;
    const auto& t = bs.knots;
    ders.setZero(nderiv + 1, bs.order);

    Eigen::MatrixXd ndu(bs.order, bs.order);
    std::vector<double> left(bs.order), right(bs.order);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= pdeg; ++j) {
        left[j] = x - t[span + 1 - j];
        right[j] = t[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }
    for (int j = 0; j <= pdeg; ++j) ders(0, j) = ndu(j, pdeg);

    const int nd = std::min(nderiv, pdeg);  // derivatives past pdeg vanish
    if (nd == 0) return;

    Eigen::MatrixXd a(2, bs.order);
    for (int r = 0; r <= pdeg; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int k = 1; k <= nd; ++k) {
            double d = 0.0;
            const int rk = r - k, pk = pdeg - k;
            if (r >= k) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                d = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? k - 1 : pdeg - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                d += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
                d += a(s2, k) * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }
    double factor = pdeg;
    for (int k = 1; k <= nd; ++k) {
        for (int j = 0; j <= pdeg; ++j) ders(k, j) *= factor;
        factor *= pdeg - k;
    }
}

}  // namespace detail

/// Builds a clamped B-spline basis with n_basis - order equally spaced
/// interior knots on [a,b].
inline BasisSystem make_bspline(double a, double b, int n_basis, int order = 4) {
    if (order < 1) throw std::invalid_argument("make_bspline: order must be >= 1");
    if (n_basis < order) throw std::invalid_argument("make_bspline: n_basis must be >= order");
    if (!(a < b)) throw std::invalid_argument("make_bspline: domain must satisfy a < b");

    BasisSystem bs;
    bs.order = order;
    bs.a = a;
    bs.b = b;
    bs.n_basis = n_basis;
    const int n_interior = n_basis - order;
    bs.interior_knots.resize(n_interior);
    for (int i = 0; i < n_interior; ++i)
        bs.interior_knots[i] = a + (b - a) * (i + 1) / (n_interior + 1);

    bs.knots.reserve(n_basis + order);
    bs.knots.insert(bs.knots.end(), order, a);
    bs.knots.insert(bs.knots.end(), bs.interior_knots.begin(), bs.interior_knots.end());
    bs.knots.insert(bs.knots.end(), order, b);
    return bs;
}

/// Evaluates the deriv_order-th derivative of every basis function at every
/// point; row g holds the K values at points[g]. Points must lie in [a,b].
inline Eigen::MatrixXd eval_basis(const BasisSystem& bs, std::span<const double> points,
                                  int deriv_order = 0) {
    if (deriv_order < 0) throw std::invalid_argument("eval_basis: deriv_order must be >= 0");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points.size()), bs.n_basis);
    Eigen::MatrixXd ders;
    for (size_t g = 0; g < points.size(); ++g) {
        const double x = points[g];
        if (!(x >= bs.a && x <= bs.b))
            throw std::domain_error("eval_basis: point outside basis domain");
        const int span = detail::find_span(bs, x);
        detail::ders_basis(bs, span, x, deriv_order, ders);
        const int first = span - bs.order + 1;
        for (int j = 0; j < bs.order; ++j) out(static_cast<Eigen::Index>(g), first + j) = ders(deriv_order, j);
    }
    return out;
}

inline Eigen::MatrixXd eval_basis(const BasisSystem& bs, const std::vector<double>& points,
                                  int deriv_order = 0) {
    return eval_basis(bs, std::span<const double>(points), deriv_order);
}

namespace detail {

// Shared kernel for gram/penalty: integrates products of deriv-order-d basis
// functions by composite Gauss-Legendre, `order` nodes per knot span (exact
// for the piecewise-polynomial integrand).
inline Eigen::MatrixXd basis_product_integrals(const BasisSystem& bs, int deriv) {
    const int K = bs.n_basis;
    const int p = bs.order;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(K, K);

    std::vector<double> gl_nodes, gl_weights;
    gauss_legendre(p, gl_nodes, gl_weights);

    Eigen::MatrixXd ders;
    for (int span = p - 1; span <= K - 1; ++span) {
        const double lo = bs.knots[span], hi = bs.knots[span + 1];
        if (!(hi > lo)) continue;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        const int first = span - p + 1;
        for (int g = 0; g < p; ++g) {
            const double x = mid + half * gl_nodes[g];
            const double w = half * gl_weights[g];
            ders_basis(bs, span, x, deriv, ders);
            for (int r = 0; r < p; ++r) {
                const double vr = ders(deriv, r);
                if (vr == 0.0) continue;
                for (int c = 0; c < p; ++c)
                    out(first + r, first + c) += w * vr * ders(deriv, c);
            }
        }
    }
    return out;
}

}  // namespace detail

/// K x K matrix of L2 inner products of the basis functions. Symmetric,
/// positive definite, banded with bandwidth order-1.
inline GramMatrix gram_matrix(const BasisSystem& bs) {
    return GramMatrix{detail::basis_product_integrals(bs, 0), bs};
}

/// Roughness penalty R with R_jk = integral of the deriv_order-th derivative
/// products. Requires deriv_order < order.
inline Eigen::MatrixXd penalty_matrix(const BasisSystem& bs, int deriv_order) {
    if (deriv_order < 0) throw std::invalid_argument("penalty_matrix: deriv_order must be >= 0");
    if (deriv_order >= bs.order)
        throw std::invalid_argument(
            "penalty_matrix: deriv_order >= order (derivative identically zero)");
    return detail::basis_product_integrals(bs, deriv_order);
}

/// Symmetric PSD square root and inverse root via eigendecomposition.
/// Eigenvalues below 1e-12 * lambda_max are clamped to that threshold before
/// rooting, which keeps the inverse root bounded for near-singular input.
inline SqrtPair psd_sqrt(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw std::invalid_argument("psd_sqrt: matrix must be square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("psd_sqrt: matrix not symmetric");

    const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw numerical_error("psd_sqrt: eigendecomposition failed");

    const Eigen::VectorXd ev = es.eigenvalues();
    const double lam_max = ev.maxCoeff();
    const double lam_norm = ev.cwiseAbs().maxCoeff();
    if (lam_max <= 0.0) throw numerical_error("psd_sqrt: matrix has no positive eigenvalue");
    if (ev.minCoeff() < -1e-12 * lam_norm)
        throw numerical_error("psd_sqrt: materially negative eigenvalue, matrix not PSD");

    const double thr = 1e-12 * lam_max;
    const Eigen::VectorXd clamped = ev.cwiseMax(thr);
    const Eigen::VectorXd root = clamped.cwiseSqrt();

    SqrtPair out;
    out.sqrt = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    out.inv_sqrt =
        es.eigenvectors() * root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    out.condition = lam_max / clamped.minCoeff();
    return out;
}

}  // namespace fplsr
