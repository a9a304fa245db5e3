#pragma once

// Penalized least-squares smoothing of discretely observed curves into basis
// coefficient form, with GCV selection of one shared smoothing parameter per
// curve set, plus mean/centering/evaluation utilities.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fplsr/basis.hpp"
#include "fplsr/error.hpp"
#include "fplsr/la.hpp"

namespace fplsr {

struct RawObservations {
    std::vector<double> argvals;  // shared grid, length J
    Eigen::MatrixXd obs;          // N x J
};

struct CurveSet {
    BasisSystem basis;
    Eigen::MatrixXd coef;  // N x n_basis
    std::optional<RawObservations> raw;
};

struct SmoothReport {
    double lambda = 0.0;
    std::vector<std::pair<double, double>> gcv_curve;  // accepted (lambda, score) pairs
    double edf = 0.0;                                  // trace of the hat matrix at lambda
};

// 0 plus 41 log-spaced values from 1e-10 to 1e4.
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    grid.reserve(42);
    grid.push_back(0.0);
    for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, -10.0 + 14.0 * i / 40.0));
    return grid;
}

// Minimizes sum_i ||y_i - E c_i||^2 + lambda c_i' R c_i per curve and keeps
// the lambda minimizing GCV(lambda) = J * sum_i SSE_i / (J - tr H)^2 over the
// whole set. Each lambda is solved through QR of the stacked system
// [E; sqrt(lambda) L] with L'L = R, which stays accurate even when the
// penalty dwarfs the data term. Lambdas with a rank-deficient stack, or where
// J - tr H <= 0, are skipped; if every grid value is skipped the smoothing
// fails.
inline std::pair<CurveSet, SmoothReport> smooth_curves(const Eigen::MatrixXd& obs,
                                                       const std::vector<double>& argvals,
                                                       const BasisSystem& bs,
                                                       const std::vector<double>& lambda_grid) {
    const Eigen::Index N = obs.rows();
    const Eigen::Index J = obs.cols();
    if (N < 1) throw std::invalid_argument("smooth_curves: need at least one curve");
    if (J < 3) throw std::invalid_argument("smooth_curves: need at least 3 observation points");
    if (static_cast<Eigen::Index>(argvals.size()) != J)
        throw std::invalid_argument("smooth_curves: argvals length must match obs columns");
    if (lambda_grid.empty()) throw std::invalid_argument("smooth_curves: empty lambda grid");
    for (size_t j = 0; j + 1 < argvals.size(); ++j)
        if (argvals[j] > argvals[j + 1])
            throw std::invalid_argument("smooth_curves: argvals must be sorted ascending");
    for (double lam : lambda_grid)
        if (!(lam >= 0.0)) throw std::invalid_argument("smooth_curves: lambda must be >= 0");

    const int K = bs.n_basis;
    const Eigen::MatrixXd E = eval_basis(bs, argvals, 0);  // J x K, throws if out of domain
    const Eigen::MatrixXd Yt = obs.transpose();            // J x N

    // Square root factor of the curvature penalty, zero rows on its
    // polynomial nullspace (the clamped psd_sqrt would spuriously penalize
    // that nullspace once multiplied by a huge lambda). Built on demand so
    // purely unpenalized grids work with low-order bases.
    Eigen::MatrixXd L;
    bool have_L = false;
    for (double lam : lambda_grid)
        if (lam > 0.0 && !have_L) {
            const Eigen::MatrixXd R = penalty_matrix(bs, 2);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
            if (es.info() != Eigen::Success)
                throw numerical_error("smooth_curves: penalty factorization failed");
            L = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                es.eigenvectors().transpose();
            have_L = true;
        }

    SmoothReport report;
    double best_gcv = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd best_coef;  // K x N
    const double dJ = static_cast<double>(J);

    for (double lam : lambda_grid) {
        const Eigen::Index rows = lam > 0.0 ? J + K : J;
        Eigen::MatrixXd S(rows, K);
        S.topRows(J) = E;
        if (lam > 0.0) S.bottomRows(K) = std::sqrt(lam) * L;

        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(S);
        if (qr.rank() < K) continue;

        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows, N);
        rhs.topRows(J) = Yt;
        const Eigen::MatrixXd C = qr.solve(rhs);  // K x N
        if (!C.allFinite()) continue;

        // With S P = Q Rf, the hat matrix is E (S'S)^{-1} E' = G'G for
        // G = Rf^{-T} P^{-1} E', so tr H is a squared Frobenius norm.
        const Eigen::MatrixXd Rf = qr.matrixR().topRows(K).triangularView<Eigen::Upper>();
        Eigen::MatrixXd G = qr.colsPermutation().inverse() * E.transpose();
        Rf.transpose().triangularView<Eigen::Lower>().solveInPlace(G);
        const double trH = G.squaredNorm();
        if (dJ - trH <= 0.0) continue;

        const double sse = (Yt - E * C).squaredNorm();
        const double gcv = dJ * sse / ((dJ - trH) * (dJ - trH));
        if (!std::isfinite(gcv) || gcv < 0.0) continue;

        report.gcv_curve.emplace_back(lam, gcv);
        if (gcv < best_gcv) {
            best_gcv = gcv;
            best_coef = C;
            report.lambda = lam;
            report.edf = trH;
        }
    }

    if (report.gcv_curve.empty())
        throw numerical_error("smooth_curves: design rank-deficient for every lambda");

    CurveSet cs{bs, best_coef.transpose(), RawObservations{argvals, obs}};
    return {std::move(cs), std::move(report)};
}

inline Eigen::VectorXd mean_curve(const CurveSet& cs) {
    if (cs.coef.rows() < 1) throw std::invalid_argument("mean_curve: empty curve set");
    return detail::column_means(cs.coef);
}

// Two subtraction passes so the returned set has mean coefficients at the
// rounding floor regardless of coefficient scale. Raw observations are
// dropped: they no longer describe the centered curves.
inline std::pair<CurveSet, Eigen::VectorXd> center(const CurveSet& cs) {
    if (cs.coef.rows() < 2) throw std::invalid_argument("center: need at least two curves");
    Eigen::MatrixXd c = cs.coef;
    const Eigen::VectorXd m1 = detail::column_means(c);
    c.rowwise() -= m1.transpose();
    const Eigen::VectorXd m2 = detail::column_means(c);
    c.rowwise() -= m2.transpose();
    return {CurveSet{cs.basis, std::move(c), std::nullopt}, m1 + m2};
}

inline Eigen::MatrixXd eval_curves(const CurveSet& cs, const std::vector<double>& grid) {
    return cs.coef * eval_basis(cs.basis, grid, 0).transpose();
}

// Contiguous row range as its own curve set. Raw observations, when present,
// are sliced alongside the coefficients.
inline CurveSet subset(const CurveSet& cs, Eigen::Index start, Eigen::Index count) {
    if (start < 0 || count < 1 || start + count > cs.coef.rows())
        throw std::invalid_argument("subset: row range out of bounds");
    std::optional<RawObservations> raw;
    if (cs.raw) raw = RawObservations{cs.raw->argvals, cs.raw->obs.middleRows(start, count)};
    return CurveSet{cs.basis, cs.coef.middleRows(start, count), std::move(raw)};
}

// Smooths the same observations with every candidate basis size and keeps the
// one whose GCV-chosen lambda scores lowest. GCV is comparable across K since
// numerator and denominator both track the hat matrix of the candidate fit.
struct NBasisSelection {
    int n_basis = 0;
    double gcv = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> trail;  // (candidate K, best gcv at that K)
};

inline NBasisSelection select_n_basis(const Eigen::MatrixXd& obs,
                                      const std::vector<double>& argvals, double a, double b,
                                      const std::vector<int>& candidates,
                                      const std::vector<double>& lambda_grid, int order = 4) {
    if (candidates.empty()) throw std::invalid_argument("select_n_basis: empty candidate list");
    NBasisSelection sel;
    for (int K : candidates) {
        const auto bs = make_bspline(a, b, K, order);
        const auto [cs, rep] = smooth_curves(obs, argvals, bs, lambda_grid);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [lam, score] : rep.gcv_curve) best = std::min(best, score);
        sel.trail.emplace_back(K, best);
        if (best < sel.gcv) {
            sel.gcv = best;
            sel.n_basis = K;
        }
    }
    return sel;
}

}  // namespace fplsr
