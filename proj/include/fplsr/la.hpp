#pragma once

// Small shared numeric helpers.

#include <Eigen/Dense>

namespace fplsr::detail {

// Column means by explicit fixed-order summation; bitwise reproducible across
// builds regardless of SIMD width, unlike a vectorized reduction.
inline Eigen::VectorXd column_means(const Eigen::MatrixXd& m) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(m.cols());
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) acc += m(i, k);
        out(k) = acc / static_cast<double>(m.rows());
    }
    return out;
}

// Index of the entry with the largest magnitude, first one on ties.
inline Eigen::Index argmax_abs(const Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > mag) {
            mag = a;
            best = i;
        }
    }
    return best;
}

// Index of the column with the largest squared norm, first one on ties.
inline Eigen::Index argmax_col_sqnorm(const Eigen::MatrixXd& m) {
    Eigen::Index best = 0;
    double sq = -1.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double s = m.col(j).squaredNorm();
        if (s > sq) {
            sq = s;
            best = j;
        }
    }
    return best;
}

}  // namespace fplsr::detail
