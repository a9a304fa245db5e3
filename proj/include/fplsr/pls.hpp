#pragma once

// Multivariate partial least squares on plain matrices. Two fitting routes,
// the Wold two-block iteration with deflation (nipals) and the covariance
// deflation recursion of de Jong (simpls), share one model type. Component
// signs are pinned (largest-magnitude weight entry positive) so refits are
// bitwise reproducible.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "fplsr/error.hpp"
#include "fplsr/la.hpp"

namespace fplsr {

enum class PlsAlgorithm { nipals, simpls };

struct PlsModel {
    PlsAlgorithm algorithm = PlsAlgorithm::nipals;
    int h = 0;              // components actually extracted
    bool truncated = false; // cross-covariance exhausted before the request
    Eigen::VectorXd x_mean; // length p
    Eigen::VectorXd y_mean; // length q
    Eigen::MatrixXd W;      // p x h weights, unit columns
    Eigen::MatrixXd T;      // N x h scores, mutually orthogonal columns
    Eigen::MatrixXd P;      // p x h X loadings
    Eigen::MatrixXd Q;      // q x h Y loadings
    Eigen::MatrixXd proj;   // p x h, maps centered X rows to scores
    Eigen::MatrixXd B;      // p x q coefficients for centered data
    Eigen::MatrixXd fitted; // N x q in-sample predictions (mean added back)
};

namespace detail {

inline void validate_pls_inputs(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int h) {
    const Eigen::Index N = X.rows();
    if (N < 2) throw std::invalid_argument("pls: need at least two rows");
    if (Y.rows() != N) throw std::invalid_argument("pls: X and Y row counts differ");
    if (X.cols() < 1 || Y.cols() < 1) throw std::invalid_argument("pls: empty X or Y");
    if (!X.allFinite() || !Y.allFinite()) throw std::invalid_argument("pls: non-finite input");
    const Eigen::Index hmax = std::min<Eigen::Index>(N - 1, X.cols());
    if (h < 1 || h > hmax) throw std::invalid_argument("pls: h out of [1, min(N-1, p)]");
}

// Flips the component sign so the largest-magnitude weight entry is positive.
inline void pin_sign(Eigen::VectorXd& w, Eigen::VectorXd& t, Eigen::VectorXd& c) {
    if (w(argmax_abs(w)) < 0.0) {
        w = -w;
        t = -t;
        c = -c;
    }
}

}  // namespace detail

inline PlsModel nipals_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int h) {
    detail::validate_pls_inputs(X, Y, h);
    const Eigen::Index N = X.rows(), p = X.cols(), q = Y.cols();

    PlsModel m;
    m.algorithm = PlsAlgorithm::nipals;
    m.x_mean = detail::column_means(X);
    m.y_mean = detail::column_means(Y);
    Eigen::MatrixXd Xr = X.rowwise() - m.x_mean.transpose();
    Eigen::MatrixXd Yr = Y.rowwise() - m.y_mean.transpose();

    // Residual cross-covariance below this scale counts as exhausted.
    const double trunc_tol = 1e-12 * Xr.norm() * Yr.norm();

    m.W.resize(p, h);
    m.T.resize(N, h);
    m.P.resize(p, h);
    m.Q.resize(q, h);

    int a = 0;
    for (; a < h; ++a) {
        Eigen::VectorXd u = Yr.col(detail::argmax_col_sqnorm(Yr));
        if ((Xr.transpose() * u).norm() <= trunc_tol) break;

        Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
        Eigen::VectorXd t = Eigen::VectorXd::Zero(N);
        Eigen::VectorXd c = Eigen::VectorXd::Zero(q);
        Eigen::VectorXd t_old = Eigen::VectorXd::Zero(N);
        for (int it = 0; it < 500; ++it) {
            w = Xr.transpose() * u;
            const double wn = w.norm();
            if (wn == 0.0) break;
            w /= wn;
            t = Xr * w;
            const double tt = t.squaredNorm();
            if (tt == 0.0) break;
            c = Yr.transpose() * t / tt;
            const double cc = c.squaredNorm();
            if (cc == 0.0) break;  // response exhausted, keep current direction
            u = Yr * c / cc;
            const double tn = t.norm();
            if (tn > 0.0 && (t - t_old).norm() / tn < 1e-10) break;
            t_old = t;
        }
        const double tt = t.squaredNorm();
        if (!(tt > 0.0)) break;
        detail::pin_sign(w, t, c);

        const Eigen::VectorXd pa = Xr.transpose() * t / tt;
        Xr.noalias() -= t * pa.transpose();
        Yr.noalias() -= t * c.transpose();

        m.W.col(a) = w;
        m.T.col(a) = t;
        m.P.col(a) = pa;
        m.Q.col(a) = c;
    }

    m.h = a;
    m.truncated = a < h;
    m.W.conservativeResize(p, a);
    m.T.conservativeResize(N, a);
    m.P.conservativeResize(p, a);
    m.Q.conservativeResize(q, a);

    if (a == 0) {
        m.proj = Eigen::MatrixXd::Zero(p, 0);
        m.B = Eigen::MatrixXd::Zero(p, q);
    } else {
        // P'W is unit upper triangular for this recursion, hence invertible.
        m.proj = m.W * (m.P.transpose() * m.W).partialPivLu().solve(
                           Eigen::MatrixXd::Identity(a, a));
        m.B = m.proj * m.Q.transpose();
    }
    m.fitted = (m.T * m.Q.transpose()).rowwise() + m.y_mean.transpose();
    return m;
}

inline PlsModel simpls_fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, int h) {
    detail::validate_pls_inputs(X, Y, h);
    const Eigen::Index N = X.rows(), p = X.cols(), q = Y.cols();

    PlsModel m;
    m.algorithm = PlsAlgorithm::simpls;
    m.x_mean = detail::column_means(X);
    m.y_mean = detail::column_means(Y);
    const Eigen::MatrixXd Xc = X.rowwise() - m.x_mean.transpose();
    const Eigen::MatrixXd Yc = Y.rowwise() - m.y_mean.transpose();

    Eigen::MatrixXd S = Xc.transpose() * Yc;  // p x q cross-covariance
    const double s0 = S.norm();

    m.W.resize(p, h);
    m.T.resize(N, h);
    m.P.resize(p, h);
    m.Q.resize(q, h);
    m.proj.resize(p, h);
    Eigen::MatrixXd V(p, h);  // orthonormal deflation directions

    int a = 0;
    for (; a < h; ++a) {
        if (S.norm() <= 1e-12 * s0 || s0 == 0.0) break;

        // Dominant left singular vector of S by power iteration on S S'.
        const Eigen::MatrixXd G = S * S.transpose();
        Eigen::VectorXd r = S.col(detail::argmax_col_sqnorm(S));
        const double rn0 = r.norm();
        if (rn0 == 0.0) break;
        r /= rn0;
        for (int it = 0; it < 1000; ++it) {
            Eigen::VectorXd next = G * r;
            const double nn = next.norm();
            if (nn == 0.0) break;
            next /= nn;
            const bool done = (next - r).norm() < 1e-12;
            r = next;
            if (done) break;
        }
        if (r(detail::argmax_abs(r)) < 0.0) r = -r;

        Eigen::VectorXd t = Xc * r;
        const double tn = t.norm();
        if (!(tn > 0.0)) break;
        t /= tn;
        const Eigen::VectorXd r_scaled = r / tn;  // so t = Xc * r_scaled exactly

        const Eigen::VectorXd pa = Xc.transpose() * t;
        const Eigen::VectorXd qa = Yc.transpose() * t;

        // Modified Gram-Schmidt with one repeat pass; a single pass loses
        // orthogonality once score norms span many orders of magnitude.
        Eigen::VectorXd v = pa;
        for (int pass = 0; pass < 2; ++pass)
            for (int b = 0; b < a; ++b) v -= V.col(b).dot(v) * V.col(b);
        const double vn = v.norm();
        if (vn <= 1e-14 * pa.norm()) break;  // loading already spanned
        v /= vn;
        S.noalias() -= v * (v.transpose() * S);
        // Re-project against the whole basis: exact arithmetic leaves S
        // orthogonal to span(V) already, this sweeps out rounding creep.
        for (int b = 0; b < a; ++b) S.noalias() -= V.col(b) * (V.col(b).transpose() * S);

        m.W.col(a) = r;
        m.T.col(a) = t;
        m.P.col(a) = pa;
        m.Q.col(a) = qa;
        m.proj.col(a) = r_scaled;
        V.col(a) = v;
    }

    m.h = a;
    m.truncated = a < h;
    m.W.conservativeResize(p, a);
    m.T.conservativeResize(N, a);
    m.P.conservativeResize(p, a);
    m.Q.conservativeResize(q, a);
    m.proj.conservativeResize(p, a);

    m.B = a == 0 ? Eigen::MatrixXd::Zero(p, q) : Eigen::MatrixXd(m.proj * m.Q.transpose());
    m.fitted = (m.T * m.Q.transpose()).rowwise() + m.y_mean.transpose();
    return m;
}

// Handwritten accumulation in a fixed (row, output, term) order; prediction is
// not a hot path and this keeps results identical across SIMD/BLAS variants.
inline Eigen::MatrixXd pls_predict(const PlsModel& m, const Eigen::MatrixXd& Xnew) {
    if (Xnew.cols() != m.B.rows())
        throw std::invalid_argument("pls_predict: column count does not match model");
    const Eigen::Index M = Xnew.rows(), p = m.B.rows(), q = m.B.cols();
    Eigen::MatrixXd out(M, q);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < q; ++j) {
            double acc = 0.0;
            for (Eigen::Index k = 0; k < p; ++k)
                acc += (Xnew(i, k) - m.x_mean(k)) * m.B(k, j);
            out(i, j) = acc + m.y_mean(j);
        }
    return out;
}

inline const Eigen::MatrixXd& pls_coefficients(const PlsModel& m) { return m.B; }

}  // namespace fplsr
