#include "fplsr/basis.hpp"

#include <gtest/gtest.h>

#include "fplsr/rng.hpp"
#include "support/oracles.hpp"

using fplsr::BasisSystem;
using fplsr::eval_basis;
using fplsr::gram_matrix;
using fplsr::make_bspline;
using fplsr::penalty_matrix;
using fplsr::psd_sqrt;

TEST(MakeBspline, OrderOneGivesIndicators) {
    const auto bs = make_bspline(0.0, 1.0, 2, 1);
    ASSERT_EQ(bs.n_basis, 2);
    ASSERT_EQ(bs.interior_knots.size(), 1u);
    EXPECT_DOUBLE_EQ(bs.interior_knots[0], 0.5);

    const std::vector<double> pts = {0.0, 0.25, 0.49, 0.5, 0.75, 1.0};
    const Eigen::MatrixXd E = eval_basis(bs, pts, 0);
    // Right-continuous indicators on [0,0.5) and [0.5,1]; left limit at b.
    EXPECT_DOUBLE_EQ(E(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(E(2, 0), 1.0);
    EXPECT_DOUBLE_EQ(E(3, 0), 0.0);
    EXPECT_DOUBLE_EQ(E(3, 1), 1.0);
    EXPECT_DOUBLE_EQ(E(5, 1), 1.0);
}

TEST(MakeBspline, EquallySpacedInteriorKnots) {
    const auto bs = make_bspline(-1.0, 1.0, 10, 4);
    ASSERT_EQ(bs.interior_knots.size(), 6u);
    for (int i = 0; i < 6; ++i)
        EXPECT_NEAR(bs.interior_knots[i], -1.0 + 2.0 * (i + 1) / 7.0, 1e-15);
    EXPECT_EQ(bs.knots.size(), 14u);
    EXPECT_DOUBLE_EQ(bs.knots.front(), -1.0);
    EXPECT_DOUBLE_EQ(bs.knots.back(), 1.0);
}

TEST(MakeBspline, RejectsBadArguments) {
    EXPECT_THROW(make_bspline(-1.0, 1.0, 3, 4), std::invalid_argument);
    EXPECT_THROW(make_bspline(1.0, 1.0, 4, 4), std::invalid_argument);
    EXPECT_THROW(make_bspline(2.0, 1.0, 4, 4), std::invalid_argument);
    EXPECT_THROW(make_bspline(0.0, 1.0, 4, 0), std::invalid_argument);
}

TEST(EvalBasis, PartitionOfUnityAcrossOrders) {
    fplsr::RandomStream rs(20240817u);
    for (int order = 1; order <= 6; ++order) {
        for (int K : {order, order + 1, order + 5, order + 12}) {
            const auto bs = make_bspline(-2.0, 3.0, K, order);
            std::vector<double> pts = {bs.a, bs.b};
            for (int i = 0; i < 200; ++i) pts.push_back(rs.uniform(bs.a, bs.b));
            const Eigen::MatrixXd E = eval_basis(bs, pts, 0);
            for (Eigen::Index g = 0; g < E.rows(); ++g) {
                EXPECT_NEAR(E.row(g).sum(), 1.0, 1e-12);
                EXPECT_GE(E.row(g).minCoeff(), 0.0);
                EXPECT_LE(E.row(g).maxCoeff(), 1.0 + 1e-12);
            }
        }
    }
}

TEST(EvalBasis, ClampedEndpointRow) {
    const auto bs = make_bspline(-1.0, 1.0, 9, 4);
    const std::vector<double> pts = {-1.0, 1.0};
    const Eigen::MatrixXd E = eval_basis(bs, pts, 0);
    EXPECT_DOUBLE_EQ(E(0, 0), 1.0);
    EXPECT_NEAR(E.row(0).tail(bs.n_basis - 1).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(E(1, bs.n_basis - 1), 1.0);
    EXPECT_NEAR(E.row(1).head(bs.n_basis - 1).cwiseAbs().maxCoeff(), 0.0, 1e-15);
}

TEST(EvalBasis, FirstDerivativeRowsSumToZero) {
    fplsr::RandomStream rs(7u);
    const auto bs = make_bspline(0.0, 2.0, 11, 4);
    std::vector<double> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(rs.uniform(0.0, 2.0));
    const Eigen::MatrixXd D1 = eval_basis(bs, pts, 1);
    for (Eigen::Index g = 0; g < D1.rows(); ++g) EXPECT_NEAR(D1.row(g).sum(), 0.0, 1e-10);
}

TEST(EvalBasis, OutOfDomainThrows) {
    const auto bs = make_bspline(0.0, 1.0, 6, 4);
    const std::vector<double> bad = {0.5, 1.0000001};
    EXPECT_THROW(eval_basis(bs, bad, 0), std::domain_error);
}

TEST(EvalBasis, DerivativeBeyondDegreeIsZero) {
    const auto bs = make_bspline(0.0, 1.0, 6, 4);
    const std::vector<double> pts = {0.2, 0.8};
    const Eigen::MatrixXd D = eval_basis(bs, pts, 4);
    EXPECT_DOUBLE_EQ(D.cwiseAbs().maxCoeff(), 0.0);
}

TEST(GramMatrix, IndicatorBasisIsDiagonal) {
    const auto g = gram_matrix(make_bspline(0.0, 1.0, 2, 1));
    EXPECT_NEAR(g.values(0, 0), 0.5, 1e-15);
    EXPECT_NEAR(g.values(1, 1), 0.5, 1e-15);
    EXPECT_NEAR(g.values(0, 1), 0.0, 1e-15);
    EXPECT_NEAR(g.values(1, 0), 0.0, 1e-15);
}

TEST(GramMatrix, EntrySumEqualsDomainLength) {
    for (int order : {1, 2, 4, 5}) {
        for (int K : {order + 1, order + 9}) {
            const auto bs = make_bspline(-1.5, 2.5, K, order);
            EXPECT_NEAR(gram_matrix(bs).values.sum(), 4.0, 1e-10);
        }
    }
}

TEST(GramMatrix, MatchesTrapezoidOracle) {
    const auto bs = make_bspline(-1.0, 1.0, 10, 4);
    const Eigen::MatrixXd G = gram_matrix(bs).values;
    const Eigen::MatrixXd ref = oracles::trapezoid_product_integrals_refined(bs, 0, 20001);
    EXPECT_LT((G - ref).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(GramMatrix, SymmetricBandedCholesky) {
    for (int order : {2, 3, 4}) {
        const auto bs = make_bspline(0.0, 1.0, order + 8, order);
        const Eigen::MatrixXd G = gram_matrix(bs).values;
        EXPECT_LT((G - G.transpose()).cwiseAbs().maxCoeff(), 1e-14);
        for (int j = 0; j < bs.n_basis; ++j)
            for (int k = 0; k < bs.n_basis; ++k)
                if (std::abs(j - k) >= order) EXPECT_DOUBLE_EQ(G(j, k), 0.0);
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        EXPECT_EQ(llt.info(), Eigen::Success);
    }
}

TEST(PenaltyMatrix, RejectsDerivAtOrder) {
    const auto bs = make_bspline(0.0, 1.0, 5, 2);
    EXPECT_THROW(penalty_matrix(bs, 2), std::invalid_argument);
}

TEST(PenaltyMatrix, PolynomialNullspace) {
    const auto bs = make_bspline(-1.0, 1.0, 12, 4);
    const Eigen::MatrixXd R = penalty_matrix(bs, 2);

    // Coefficients reproducing f(x)=1 and f(x)=x via interpolation of the
    // exact functions (B-splines reproduce polynomials below their degree).
    const auto grid = oracles::linspace(bs.a, bs.b, 3 * bs.n_basis);
    const Eigen::MatrixXd E = eval_basis(bs, grid, 0);
    Eigen::VectorXd ones_target = Eigen::VectorXd::Ones(grid.size());
    Eigen::VectorXd lin_target(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) lin_target(i) = grid[i];
    const Eigen::VectorXd c_const = (E.transpose() * E).ldlt().solve(E.transpose() * ones_target);
    const Eigen::VectorXd c_lin = (E.transpose() * E).ldlt().solve(E.transpose() * lin_target);

    EXPECT_LT(c_const.dot(R * c_const), 1e-10);
    EXPECT_LT(c_lin.dot(R * c_lin), 1e-10);
}

TEST(PenaltyMatrix, MatchesTrapezoidOracle) {
    const auto bs = make_bspline(-1.0, 1.0, 10, 4);
    const Eigen::MatrixXd R = penalty_matrix(bs, 2);
    const Eigen::MatrixXd ref = oracles::trapezoid_product_integrals(bs, 2, 200001);
    const double rel = (R - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
    EXPECT_LT(rel, 1e-6);
}

TEST(PsdSqrt, Identity) {
    const auto pair = psd_sqrt(Eigen::MatrixXd::Identity(4, 4));
    EXPECT_LT((pair.sqrt - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-14);
    EXPECT_LT((pair.inv_sqrt - Eigen::MatrixXd::Identity(4, 4)).norm(), 1e-14);
    EXPECT_NEAR(pair.condition, 1.0, 1e-12);
}

TEST(PsdSqrt, DiagonalCase) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2, 2);
    M(0, 0) = 4.0;
    M(1, 1) = 9.0;
    const auto pair = psd_sqrt(M);
    EXPECT_NEAR(pair.sqrt(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(pair.sqrt(1, 1), 3.0, 1e-12);
    EXPECT_NEAR(pair.inv_sqrt(0, 0), 0.5, 1e-12);
    EXPECT_NEAR(pair.inv_sqrt(1, 1), 1.0 / 3.0, 1e-12);
}

TEST(PsdSqrt, RandomSpdRoundTrip) {
    fplsr::RandomStream rs(99u);
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 6 + 3 * trial;
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rs.normal();
        const Eigen::MatrixXd M = A * A.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);

        const auto pair = psd_sqrt(M);
        EXPECT_LT((pair.sqrt * pair.sqrt - M).norm() / M.norm(), 1e-10);
        EXPECT_LT((pair.sqrt * pair.inv_sqrt - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-8);
    }
}

TEST(PsdSqrt, RejectsBadInput) {
    Eigen::MatrixXd nonsym(2, 2);
    nonsym << 1.0, 0.5, -0.5, 1.0;
    EXPECT_THROW(psd_sqrt(nonsym), std::invalid_argument);

    Eigen::MatrixXd indef(2, 2);
    indef << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(psd_sqrt(indef), fplsr::numerical_error);
}

TEST(GramMatrix, SqrtPairStabilizesGramGeometry) {
    const auto bs = make_bspline(0.0, 1.0, 15, 4);
    const auto g = gram_matrix(bs);
    const auto pair = psd_sqrt(g.values);
    EXPECT_LT((pair.sqrt * pair.sqrt - g.values).norm() / g.values.norm(), 1e-10);
    EXPECT_LT((pair.sqrt * pair.inv_sqrt - Eigen::MatrixXd::Identity(bs.n_basis, bs.n_basis)).norm(),
              1e-8);
}
