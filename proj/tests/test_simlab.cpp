#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fplsr/simlab.hpp"

using namespace fplsr;

namespace {

SimConfig quick_config() {
    SimConfig cfg;
    cfg.N = 100;
    cfg.rho = 0.5;
    cfg.n_points = 50;
    cfg.K = 10;
    cfg.h = 5;
    cfg.mc = 1;
    cfg.seed = 20240817ULL;
    return cfg;
}

}  // namespace

TEST(GenDataset, SameSeedBitwiseIdentical) {
    RandomStream s1 = RandomStream::keyed(99, 3, 0);
    RandomStream s2 = RandomStream::keyed(99, 3, 0);
    const SimDataset a = gen_dataset(20, 1.0, 30, 8, s1);
    const SimDataset b = gen_dataset(20, 1.0, 30, 8, s2);
    ASSERT_EQ(a.s, b.s);
    ASSERT_EQ(a.t, b.t);
    ASSERT_TRUE((a.X.array() == b.X.array()).all());
    ASSERT_TRUE((a.Y.array() == b.Y.array()).all());
}

TEST(GenDataset, GridsSortedSharedAndInDomain) {
    RandomStream s = RandomStream::keyed(5, 0, 0);
    const SimDataset d = gen_dataset(10, 2.0, 40, 10, s);
    ASSERT_EQ(static_cast<int>(d.s.size()), 40);
    ASSERT_EQ(static_cast<int>(d.t.size()), 40);
    for (int j = 1; j < 40; ++j) {
        EXPECT_LE(d.s[j - 1], d.s[j]);
        EXPECT_LE(d.t[j - 1], d.t[j]);
    }
    for (double v : d.s) {
        EXPECT_GT(v, -1.0);
        EXPECT_LT(v, 1.0);
    }
    EXPECT_EQ(d.X.rows(), 10);
    EXPECT_EQ(d.X.cols(), 40);
    EXPECT_EQ(d.Y.rows(), 10);
    EXPECT_EQ(d.Y.cols(), 40);
}

// Draw many error vectors with the internal covariance routine and compare the
// empirical covariance against rho * 0.5^|k-l| entrywise.
TEST(GenDataset, ErrorCovarianceMatchesTarget) {
    const int K_err = 10;
    const double rho = 4.0;
    const int n_draws = 100000;
    const Eigen::MatrixXd chol = detail::error_covariance_cholesky(K_err, rho);

    RandomStream s = RandomStream::keyed(777, 0, 0);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(K_err, K_err);
    Eigen::VectorXd z(K_err), e(K_err);
    for (int i = 0; i < n_draws; ++i) {
        for (int k = 0; k < K_err; ++k) z(k) = s.normal();
        e = chol * z;
        sum += e * e.transpose();
    }
    const Eigen::MatrixXd emp = sum / static_cast<double>(n_draws);
    for (int k = 0; k < K_err; ++k)
        for (int l = 0; l < K_err; ++l) {
            const double target = rho * std::pow(0.5, std::abs(k - l));
            EXPECT_NEAR(emp(k, l), target, 0.05) << "entry (" << k << "," << l << ")";
        }
}

// With tiny parameter spread the predictor mean function is close to the
// curve at the mean parameters, cos(exp(2 s)) - 3 s.
TEST(GenDataset, PredictorMeanMatchesMeanFunction) {
    RandomStream s = RandomStream::keyed(31, 0, 0);
    const int N = 10000;
    const SimDataset d = gen_dataset(N, 1.0, 25, 8, s);
    for (int j = 0; j < 25; ++j) {
        double acc = 0.0;
        for (int i = 0; i < N; ++i) acc += d.X(i, j);
        const double emp_mean = acc / static_cast<double>(N);
        const double sj = d.s[j];
        const double truth = std::cos(std::exp(2.0 * sj)) - 3.0 * sj;
        EXPECT_NEAR(emp_mean, truth, 0.05) << "s = " << sj;
    }
}

TEST(GenDataset, RejectsBadArguments) {
    RandomStream s = RandomStream::keyed(1, 0, 0);
    EXPECT_THROW(gen_dataset(0, 1.0, 30, 8, s), std::invalid_argument);
    EXPECT_THROW(gen_dataset(10, 0.0, 30, 8, s), std::invalid_argument);
    EXPECT_THROW(gen_dataset(10, -1.0, 30, 8, s), std::invalid_argument);
    EXPECT_THROW(gen_dataset(10, 1.0, 2, 8, s), std::invalid_argument);
}

TEST(RunReplication, PlsMetricsFiniteAndPositive) {
    const SimConfig cfg = quick_config();
    const std::vector<MethodResult> res = run_replication(cfg, 0);
    ASSERT_EQ(res.size(), 3u);
    for (const MethodResult& r : res) {
        if (r.method == FfrAlgorithm::ridge) continue;
        EXPECT_FALSE(r.failed) << algorithm_name(r.method) << ": " << r.failure_reason;
        EXPECT_TRUE(std::isfinite(r.amse));
        EXPECT_TRUE(std::isfinite(r.amse_p));
        EXPECT_GT(r.amse, 0.0);
        EXPECT_GT(r.amse_p, 0.0);
        EXPECT_GE(r.fit_seconds, 0.0);
    }
}

TEST(RunReplication, RepeatRunBitwiseIdentical) {
    const SimConfig cfg = quick_config();
    const auto a = run_replication(cfg, 4);
    const auto b = run_replication(cfg, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].failed, b[i].failed);
        if (a[i].failed) continue;
        EXPECT_EQ(a[i].amse, b[i].amse);
        EXPECT_EQ(a[i].amse_p, b[i].amse_p);
    }
}

// Shut off both noise sources; a rich PLS fit should then track the smooth
// signal almost exactly.
TEST(RunReplication, NoiselessDataNearInterpolation) {
    SimConfig cfg = quick_config();
    cfg.rho = 1e-8;
    cfg.obs_noise_sd = 0.0;
    cfg.K = 20;
    cfg.h = 10;
    cfg.methods = {FfrAlgorithm::simpls};
    const auto res = run_replication(cfg, 0);
    ASSERT_EQ(res.size(), 1u);
    ASSERT_FALSE(res[0].failed) << res[0].failure_reason;
    EXPECT_LT(res[0].amse, 1e-2);
}

TEST(RunReplication, RejectsOddN) {
    SimConfig cfg = quick_config();
    cfg.N = 99;
    EXPECT_THROW(run_replication(cfg, 0), std::invalid_argument);
}

TEST(RunExperiment, SingleReplicationMatchesRunReplication) {
    SimConfig base = quick_config();
    base.mc = 1;
    ExperimentGrid grid;
    grid.base = base;
    grid.rho_list = {0.5};
    grid.K_list = {10};
    const ExperimentResult out = run_experiment(grid);

    SimConfig cell = base;
    cell.rho = 0.5;
    cell.K = 10;
    const auto direct = run_replication(cell, 0);

    ASSERT_EQ(out.records.size(), direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
        EXPECT_EQ(out.records[i].method, direct[i].method);
        if (direct[i].failed) {
            EXPECT_EQ(out.records[i].failures, 1);
            continue;
        }
        EXPECT_EQ(out.records[i].mean_amse, direct[i].amse);
        EXPECT_EQ(out.records[i].mean_amse_p, direct[i].amse_p);
        EXPECT_EQ(out.records[i].se_amse, 0.0);
        EXPECT_EQ(out.records[i].failures, 0);
    }
    ASSERT_EQ(out.losses.size(), direct.size());
}

// Replication streams are keyed by index, so growing mc must not disturb the
// early replications.
TEST(RunExperiment, DoublingMcKeepsFirstReplications) {
    SimConfig base = quick_config();
    base.N = 20;
    base.n_points = 25;
    base.methods = {FfrAlgorithm::simpls};

    ExperimentGrid g1;
    g1.base = base;
    g1.base.mc = 2;
    g1.rho_list = {1.0};
    g1.K_list = {8};

    ExperimentGrid g2 = g1;
    g2.base.mc = 4;

    const ExperimentResult r1 = run_experiment(g1);
    const ExperimentResult r2 = run_experiment(g2);
    ASSERT_EQ(r1.losses.size(), 2u);
    ASSERT_EQ(r2.losses.size(), 4u);
    for (int rep = 0; rep < 2; ++rep) {
        EXPECT_EQ(r1.losses[rep].amse, r2.losses[rep].amse);
        EXPECT_EQ(r1.losses[rep].amse_p, r2.losses[rep].amse_p);
    }
}

TEST(RunExperiment, RecordsCoverGridDeterministically) {
    SimConfig base = quick_config();
    base.N = 20;
    base.n_points = 25;
    base.mc = 2;
    base.methods = {FfrAlgorithm::nipals, FfrAlgorithm::simpls};

    ExperimentGrid grid;
    grid.base = base;
    grid.rho_list = {0.5, 2.0};
    grid.K_list = {8, 10};

    const ExperimentResult a = run_experiment(grid);
    const ExperimentResult b = run_experiment(grid);
    ASSERT_EQ(a.records.size(), 2u * 2u * 2u);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].method, b.records[i].method);
        EXPECT_EQ(a.records[i].K, b.records[i].K);
        EXPECT_EQ(a.records[i].rho, b.records[i].rho);
        EXPECT_EQ(a.records[i].mean_amse, b.records[i].mean_amse);
        EXPECT_EQ(a.records[i].se_amse, b.records[i].se_amse);
        EXPECT_EQ(a.records[i].mean_amse_p, b.records[i].mean_amse_p);
        EXPECT_GE(a.records[i].se_amse, 0.0);
    }
    ASSERT_EQ(a.losses.size(), 2u * 2u * 2u * 2u);
}

TEST(RunExperiment, RejectsEmptyGrid) {
    ExperimentGrid grid;
    grid.base = quick_config();
    grid.rho_list = {};
    grid.K_list = {10};
    EXPECT_THROW(run_experiment(grid), std::invalid_argument);
}

// Small-scale version of the headline comparison: at low K and low rho the
// PLS fits should beat the ridge baseline on held-out error.
TEST(RunExperiment, PlsBeatsRidgeAtSmallK) {
    SimConfig base = quick_config();
    base.mc = 20;

    ExperimentGrid grid;
    grid.base = base;
    grid.rho_list = {0.5};
    grid.K_list = {10};
    const ExperimentResult out = run_experiment(grid);
    ASSERT_EQ(out.records.size(), 3u);

    double nipals_p = 0.0, simpls_p = 0.0, ridge_p = 0.0;
    for (const ExperimentRecord& rec : out.records) {
        EXPECT_EQ(rec.failures, 0) << algorithm_name(rec.method);
        if (rec.method == FfrAlgorithm::nipals) nipals_p = rec.mean_amse_p;
        if (rec.method == FfrAlgorithm::simpls) simpls_p = rec.mean_amse_p;
        if (rec.method == FfrAlgorithm::ridge) ridge_p = rec.mean_amse_p;
    }
    EXPECT_LT(nipals_p, ridge_p);
    EXPECT_LT(simpls_p, ridge_p);
}
