#pragma once

// Function-on-function regression over basis coefficients. The response and
// predictor coefficient blocks are mapped through their Gram square roots so
// that ordinary matrix PLS (or a ridge baseline) runs in a geometry where
// Euclidean inner products equal L2 inner products of the underlying curves;
// fitted coefficients are then mapped back per block.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fplsr/basis.hpp"
#include "fplsr/error.hpp"
#include "fplsr/fdata.hpp"
#include "fplsr/pls.hpp"

namespace fplsr {

enum class FfrAlgorithm { nipals, simpls, ridge };

inline const char* algorithm_name(FfrAlgorithm a) {
    switch (a) {
        case FfrAlgorithm::nipals: return "nipals";
        case FfrAlgorithm::simpls: return "simpls";
        case FfrAlgorithm::ridge: return "ridge";
    }
    return "?";
}

inline FfrAlgorithm algorithm_from_name(const std::string& name) {
    if (name == "nipals") return FfrAlgorithm::nipals;
    if (name == "simpls") return FfrAlgorithm::simpls;
    if (name == "ridge") return FfrAlgorithm::ridge;
    throw std::invalid_argument("unknown algorithm name: " + name);
}

struct DesignBundle {
    Eigen::MatrixXd Xd;                  // N x sum_m K_m, block m = centered D_m * zeta_m^{1/2}
    Eigen::MatrixXd Yd;                  // N x K_Y, centered C * Phi^{1/2}
    std::vector<Eigen::Index> offsets;   // block start columns
    std::vector<Eigen::Index> widths;    // block widths
    GramMatrix response_gram;            // Phi
    SqrtPair response_sqrt;
    std::vector<GramMatrix> predictor_grams;  // zeta_m
    std::vector<SqrtPair> predictor_sqrts;
};

struct CenteringMeans {
    Eigen::VectorXd response;
    std::vector<Eigen::VectorXd> predictors;
};

struct PredictorBlock {
    BasisSystem basis;
    Eigen::VectorXd mean;    // training coefficient mean
    GramMatrix gram;         // zeta_m
    SqrtPair gram_sqrt;
    Eigen::MatrixXd B;       // K_m x K_Y back-transformed coefficients
};

struct FfrOptions {
    // Grid for the ridge baseline's GCV search; strictly positive values keep
    // the baseline defined even when plain LS is singular. Tests may pass a
    // near-zero grid to pin the LS limit.
    std::vector<double> ridge_theta_grid = {};
};

// The ridge path stands in for the plain least-squares baseline, so the
// default grid stays in the weak-regularization range: just enough to make a
// singular normal system solvable, not enough to act as real shrinkage.
inline std::vector<double> default_ridge_theta_grid() {
    std::vector<double> grid;
    grid.reserve(13);
    for (int i = 0; i <= 12; ++i) grid.push_back(std::pow(10.0, -10.0 + 0.5 * i));
    return grid;
}

struct FfrModel {
    FfrAlgorithm algorithm = FfrAlgorithm::simpls;
    int h = 0;               // PLS components actually used (0 for ridge)
    bool truncated = false;
    BasisSystem response_basis;
    Eigen::VectorXd response_mean;  // training mean response coefficients
    GramMatrix response_gram;
    SqrtPair response_sqrt;
    std::vector<PredictorBlock> blocks;
    PlsModel pls;            // populated on the PLS paths
    double ridge_theta = 0.0;
    Eigen::MatrixXd xi;      // half-metric coefficient matrix (sum_m K_m) x K_Y
    Eigen::MatrixXd fitted_coef;  // N x K_Y in-sample response coefficients
};

inline std::pair<DesignBundle, CenteringMeans> build_design(
    const CurveSet& response, const std::vector<CurveSet>& predictors) {
    if (predictors.empty()) throw std::invalid_argument("build_design: no predictors");
    const Eigen::Index N = response.coef.rows();
    if (N < 2) throw std::invalid_argument("build_design: need at least two curves");
    for (const auto& p : predictors)
        if (p.coef.rows() != N)
            throw std::invalid_argument("build_design: predictor curve count mismatch");

    DesignBundle bundle;
    CenteringMeans means;

    const auto [yc, ymean] = center(response);
    means.response = ymean;
    bundle.response_gram = gram_matrix(response.basis);
    bundle.response_sqrt = psd_sqrt(bundle.response_gram.values);
    bundle.Yd = yc.coef * bundle.response_sqrt.sqrt;

    Eigen::Index width = 0;
    for (const auto& p : predictors) width += p.basis.n_basis;
    bundle.Xd.resize(N, width);

    Eigen::Index at = 0;
    for (const auto& p : predictors) {
        const auto [xc, xmean] = center(p);
        means.predictors.push_back(xmean);
        bundle.predictor_grams.push_back(gram_matrix(p.basis));
        bundle.predictor_sqrts.push_back(psd_sqrt(bundle.predictor_grams.back().values));
        bundle.offsets.push_back(at);
        bundle.widths.push_back(p.basis.n_basis);
        bundle.Xd.middleCols(at, p.basis.n_basis) = xc.coef * bundle.predictor_sqrts.back().sqrt;
        at += p.basis.n_basis;
    }
    if (!bundle.Xd.allFinite() || !bundle.Yd.allFinite())
        throw numerical_error("build_design: non-finite design entries");
    return {std::move(bundle), std::move(means)};
}

namespace detail {

// Ridge solution over a theta grid scored by GCV(theta) = N*RSS/(N - tr H)^2.
// theta = 0 is accepted only while the design has full numerical rank.
struct RidgeFit {
    Eigen::MatrixXd coef;
    double theta = 0.0;
};

inline RidgeFit ridge_gcv(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                          const std::vector<double>& theta_grid) {
    if (theta_grid.empty()) throw std::invalid_argument("ridge_gcv: empty theta grid");
    const Eigen::Index N = X.rows();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const Eigen::MatrixXd Z = svd.matrixU().transpose() * Y;  // r x q
    const double rank_tol =
        std::max(X.rows(), X.cols()) * std::numeric_limits<double>::epsilon() *
        (sv.size() > 0 ? sv(0) : 0.0);

    RidgeFit best;
    double best_gcv = std::numeric_limits<double>::infinity();
    bool found = false;

    for (double theta : theta_grid) {
        if (!(theta >= 0.0)) throw std::invalid_argument("ridge_gcv: negative theta");
        Eigen::VectorXd f(sv.size());
        bool singular = false;
        double trH = 0.0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            const double s = sv(i);
            if (theta == 0.0) {
                if (s <= rank_tol) {
                    singular = true;
                    break;
                }
                f(i) = 1.0 / s;
                trH += 1.0;
            } else {
                f(i) = s / (s * s + theta);
                trH += s * s / (s * s + theta);
            }
        }
        if (singular) continue;
        if (static_cast<double>(N) - trH <= 0.0) continue;

        const Eigen::MatrixXd coef = svd.matrixV() * (f.asDiagonal() * Z);
        const double rss = (Y - X * coef).squaredNorm();
        const double denom = static_cast<double>(N) - trH;
        const double gcv = static_cast<double>(N) * rss / (denom * denom);
        if (!std::isfinite(gcv)) continue;
        if (gcv < best_gcv) {
            best_gcv = gcv;
            best.coef = coef;
            best.theta = theta;
            found = true;
        }
    }
    if (!found) throw numerical_error("ridge_gcv: design singular for every theta");
    return best;
}

}  // namespace detail

inline FfrModel fit_ffr(const CurveSet& response, const std::vector<CurveSet>& predictors, int h,
                        FfrAlgorithm algorithm, const FfrOptions& options = {}) {
    auto [bundle, means] = build_design(response, predictors);

    FfrModel model;
    model.algorithm = algorithm;
    model.response_basis = response.basis;
    model.response_mean = means.response;
    model.response_gram = bundle.response_gram;
    model.response_sqrt = bundle.response_sqrt;

    if (algorithm == FfrAlgorithm::ridge) {
        const auto& grid =
            options.ridge_theta_grid.empty() ? default_ridge_theta_grid() : options.ridge_theta_grid;
        const auto rf = detail::ridge_gcv(bundle.Xd, bundle.Yd, grid);
        model.xi = rf.coef;
        model.ridge_theta = rf.theta;
        model.h = 0;
    } else {
        if (h < 1) throw std::invalid_argument("fit_ffr: PLS needs h >= 1");
        const PlsModel pm = algorithm == FfrAlgorithm::nipals
                                ? nipals_fit(bundle.Xd, bundle.Yd, h)
                                : simpls_fit(bundle.Xd, bundle.Yd, h);
        model.pls = pm;
        model.xi = pm.B;
        model.h = pm.h;
        model.truncated = pm.truncated;
    }

    for (size_t m = 0; m < predictors.size(); ++m) {
        PredictorBlock blk;
        blk.basis = predictors[m].basis;
        blk.mean = means.predictors[m];
        blk.gram = bundle.predictor_grams[m];
        blk.gram_sqrt = bundle.predictor_sqrts[m];
        blk.B = blk.gram_sqrt.inv_sqrt *
                model.xi.middleRows(bundle.offsets[m], bundle.widths[m]) *
                model.response_sqrt.inv_sqrt;
        model.blocks.push_back(std::move(blk));
    }

    model.fitted_coef =
        (bundle.Xd * model.xi * model.response_sqrt.inv_sqrt).rowwise() +
        model.response_mean.transpose();
    return model;
}

inline Eigen::MatrixXd coefficient_surface(const FfrModel& model, size_t m,
                                           const std::vector<double>& sgrid,
                                           const std::vector<double>& tgrid) {
    if (m >= model.blocks.size()) throw std::invalid_argument("coefficient_surface: bad index");
    const auto& blk = model.blocks[m];
    return eval_basis(blk.basis, sgrid, 0) * blk.B *
           eval_basis(model.response_basis, tgrid, 0).transpose();
}

// Intercept curve coefficients: response mean minus the means' contribution
// through the fitted surfaces.
inline Eigen::VectorXd intercept_coefficients(const FfrModel& model) {
    Eigen::VectorXd c = model.response_mean;
    for (const auto& blk : model.blocks)
        c -= (blk.mean.transpose() * blk.gram.values * blk.B).transpose();
    return c;
}

inline CurveSet predict_response(const FfrModel& model,
                                 const std::vector<CurveSet>& new_predictors) {
    if (new_predictors.size() != model.blocks.size())
        throw std::invalid_argument("predict_response: predictor count mismatch");
    const Eigen::Index M = new_predictors.front().coef.rows();
    Eigen::MatrixXd coef(M, model.response_basis.n_basis);
    coef.rowwise() = model.response_mean.transpose();
    for (size_t m = 0; m < model.blocks.size(); ++m) {
        const auto& blk = model.blocks[m];
        if (!(new_predictors[m].basis == blk.basis))
            throw std::invalid_argument("predict_response: basis mismatch");
        if (new_predictors[m].coef.rows() != M)
            throw std::invalid_argument("predict_response: curve count mismatch");
        const Eigen::MatrixXd centered =
            new_predictors[m].coef.rowwise() - blk.mean.transpose();
        coef.noalias() += centered * blk.gram.values * blk.B;
    }
    return CurveSet{model.response_basis, std::move(coef), std::nullopt};
}

// Grid-average squared distance between two curve sets: evaluate both on
// grid_size equally spaced points of the observed domain and average per
// curve, then across curves. Fixed-order accumulation.
inline double amse(const CurveSet& observed, const CurveSet& predicted, int grid_size = 101) {
    if (observed.coef.rows() != predicted.coef.rows())
        throw std::invalid_argument("amse: curve count mismatch");
    if (grid_size < 2) throw std::invalid_argument("amse: need at least two grid points");
    if (observed.basis.a != predicted.basis.a || observed.basis.b != predicted.basis.b)
        throw std::invalid_argument("amse: domain mismatch");

    std::vector<double> grid(grid_size);
    for (int g = 0; g < grid_size; ++g)
        grid[g] = observed.basis.a +
                  (observed.basis.b - observed.basis.a) * g / (grid_size - 1);
    const Eigen::MatrixXd A = eval_curves(observed, grid);
    const Eigen::MatrixXd B = eval_curves(predicted, grid);

    double total = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        double sse = 0.0;
        for (int g = 0; g < grid_size; ++g) {
            const double d = A(i, g) - B(i, g);
            sse += d * d;
        }
        total += sse / static_cast<double>(grid_size);
    }
    return total / static_cast<double>(A.rows());
}

}  // namespace fplsr
