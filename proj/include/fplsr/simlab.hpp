#pragma once

// Monte-Carlo study driver: synthetic paired curve data with autoregressive
// functional errors, train/test evaluation of the regression methods, and
// deterministic aggregation across replications. Every random draw comes from
// a counter-based stream keyed by (master seed, replication, variable), so
// results do not depend on thread scheduling.

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "fplsr/error.hpp"
#include "fplsr/ffrm.hpp"
#include "fplsr/rng.hpp"

namespace fplsr {

struct SimConfig {
    int N = 100;             // curves per replication, split in halves
    double rho = 1.0;        // error covariance scale
    int n_points = 50;       // observation points per curve
    int K = 10;              // basis count for smoothing (and error dimension)
    int h = 5;               // PLS components
    int mc = 100;            // replications
    std::uint64_t seed = 0;  // master seed
    std::vector<FfrAlgorithm> methods = {FfrAlgorithm::nipals, FfrAlgorithm::simpls,
                                         FfrAlgorithm::ridge};
    double obs_noise_sd = 1.0;  // measurement noise scale (1 matches the study)
};

struct SimDataset {
    std::vector<double> s;  // predictor argument grid, sorted, shared
    std::vector<double> t;  // response argument grid, sorted, shared
    Eigen::MatrixXd X;      // N x n_points
    Eigen::MatrixXd Y;      // N x n_points
};

struct MethodResult {
    FfrAlgorithm method = FfrAlgorithm::nipals;
    double amse = 0.0;
    double amse_p = 0.0;
    double fit_seconds = 0.0;
    bool failed = false;
    std::string failure_reason;
};

struct ExperimentRecord {
    FfrAlgorithm method = FfrAlgorithm::nipals;
    int K = 0;
    double rho = 0.0;
    double mean_amse = 0.0;
    double se_amse = 0.0;
    double mean_amse_p = 0.0;
    double se_amse_p = 0.0;
    double mean_fit_seconds = 0.0;
    int failures = 0;
};

struct ReplicationLoss {
    double rho = 0.0;
    int K = 0;
    int rep = 0;
    FfrAlgorithm method = FfrAlgorithm::nipals;
    double amse = 0.0;
    double amse_p = 0.0;
    double fit_seconds = 0.0;
    bool failed = false;
};

struct ExperimentGrid {
    SimConfig base;                // N, n_points, h, mc, seed, methods
    std::vector<double> rho_list;
    std::vector<int> K_list;
};

struct ExperimentResult {
    std::vector<ExperimentRecord> records;
    std::vector<ReplicationLoss> losses;
};

namespace detail {

// Cholesky factor of the AR-style covariance [rho * 0.5^|k-l|].
inline Eigen::MatrixXd error_covariance_cholesky(int K_err, double rho) {
    Eigen::MatrixXd sigma(K_err, K_err);
    for (int k = 0; k < K_err; ++k)
        for (int l = 0; l < K_err; ++l) sigma(k, l) = rho * std::pow(0.5, std::abs(k - l));
    const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
        throw numerical_error("error covariance not positive definite");
    return llt.matrixL();
}

inline int thread_budget() {
    if (const char* env = std::getenv("FPLSR_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace detail

// One replication's raw data. Curves share the argument grids; predictor and
// response reuse the same subject-level (a1, a2) pair; the response carries a
// correlated functional error on a K_err-dimensional spline basis.
inline SimDataset gen_dataset(int N, double rho, int n_points, int K_err, RandomStream& stream,
                              double obs_noise_sd = 1.0) {
    if (N < 1 || n_points < 3 || K_err < 4) throw std::invalid_argument("gen_dataset: bad sizes");
    if (!(rho > 0.0)) throw std::invalid_argument("gen_dataset: rho must be positive");

    RandomStream pts = stream.fork(1);
    RandomStream params = stream.fork(2);
    RandomStream errors = stream.fork(3);
    RandomStream noise = stream.fork(4);

    SimDataset d;
    d.s.resize(n_points);
    d.t.resize(n_points);
    for (int j = 0; j < n_points; ++j) d.s[j] = pts.uniform(-1.0, 1.0);
    for (int j = 0; j < n_points; ++j) d.t[j] = pts.uniform(-1.0, 1.0);
    std::sort(d.s.begin(), d.s.end());
    std::sort(d.t.begin(), d.t.end());

    const auto err_basis = make_bspline(-1.0, 1.0, K_err, 4);
    const Eigen::MatrixXd phi_t = eval_basis(err_basis, d.t, 0);  // n_points x K_err
    const Eigen::MatrixXd chol = detail::error_covariance_cholesky(K_err, rho);

    d.X.resize(N, n_points);
    d.Y.resize(N, n_points);
    Eigen::VectorXd z(K_err);
    for (int i = 0; i < N; ++i) {
        const double a1 = params.normal(2.0, 0.02);
        const double a2 = params.normal(-3.0, 0.04);
        for (int k = 0; k < K_err; ++k) z(k) = errors.normal();
        const Eigen::VectorXd e = chol * z;
        const Eigen::VectorXd eps_curve = phi_t * e;

        for (int j = 0; j < n_points; ++j) {
            const double sj = d.s[j];
            d.X(i, j) = std::cos(std::exp(a1 * sj)) + a2 * sj +
                        obs_noise_sd * noise.normal();
        }
        for (int j = 0; j < n_points; ++j) {
            const double tj = d.t[j];
            d.Y(i, j) = std::sin(std::exp(a1 * tj)) + a2 * tj + 2.0 * tj * tj + eps_curve(j) +
                        obs_noise_sd * noise.normal();
        }
    }
    return d;
}

// Smooths one replication's data, fits every requested method on the first
// half, and scores AMSE on that half and AMSE_p on the held-out second half.
// Method failures are recorded per cell; smoothing failures propagate.
inline std::vector<MethodResult> run_replication(const SimConfig& cfg, int rep_index) {
    if (cfg.N < 4 || cfg.N % 2 != 0) throw std::invalid_argument("run_replication: N must be even");
    if (cfg.mc < 1) throw std::invalid_argument("run_replication: mc must be >= 1");
    if (!(cfg.rho > 0.0)) throw std::invalid_argument("run_replication: rho must be positive");

    RandomStream stream = RandomStream::keyed(cfg.seed, static_cast<std::uint64_t>(rep_index), 0);
    const SimDataset data =
        gen_dataset(cfg.N, cfg.rho, cfg.n_points, cfg.K, stream, cfg.obs_noise_sd);

    const auto bs = make_bspline(-1.0, 1.0, cfg.K, 4);
    const auto lambda_grid = default_lambda_grid();
    const auto [xset, xrep] = smooth_curves(data.X, data.s, bs, lambda_grid);
    const auto [yset, yrep] = smooth_curves(data.Y, data.t, bs, lambda_grid);

    const Eigen::Index half = cfg.N / 2;
    const CurveSet x_train = subset(xset, 0, half);
    const CurveSet x_test = subset(xset, half, cfg.N - half);
    const CurveSet y_train = subset(yset, 0, half);
    const CurveSet y_test = subset(yset, half, cfg.N - half);

    std::vector<MethodResult> out;
    for (FfrAlgorithm alg : cfg.methods) {
        MethodResult r;
        r.method = alg;
        try {
            const auto start = std::chrono::steady_clock::now();
            const FfrModel model = fit_ffr(y_train, {x_train}, cfg.h, alg);
            const auto stop = std::chrono::steady_clock::now();
            r.fit_seconds = std::chrono::duration<double>(stop - start).count();
            r.amse = amse(y_train, predict_response(model, {x_train}));
            r.amse_p = amse(y_test, predict_response(model, {x_test}));
        } catch (const std::exception& ex) {
            r.failed = true;
            r.failure_reason = ex.what();
        }
        out.push_back(std::move(r));
    }
    return out;
}

// Full grid sweep. Replications run in parallel up to FPLSR_THREADS (or the
// hardware count) but land in slots indexed by replication, so the aggregate
// is identical for any schedule.
inline ExperimentResult run_experiment(const ExperimentGrid& grid) {
    if (grid.rho_list.empty() || grid.K_list.empty())
        throw std::invalid_argument("run_experiment: empty grid");
    const int mc = grid.base.mc;
    if (mc < 1) throw std::invalid_argument("run_experiment: mc must be >= 1");

    ExperimentResult result;
    const int n_threads = std::min(detail::thread_budget(), mc);

    for (double rho : grid.rho_list) {
        for (int K : grid.K_list) {
            SimConfig cfg = grid.base;
            cfg.rho = rho;
            cfg.K = K;

            std::vector<std::vector<MethodResult>> reps(mc);
            if (n_threads <= 1) {
                for (int rep = 0; rep < mc; ++rep) reps[rep] = run_replication(cfg, rep);
            } else {
                std::atomic<int> next{0};
                std::vector<std::thread> pool;
                pool.reserve(n_threads);
                for (int w = 0; w < n_threads; ++w)
                    pool.emplace_back([&] {
                        for (int rep = next.fetch_add(1); rep < mc; rep = next.fetch_add(1))
                            reps[rep] = run_replication(cfg, rep);
                    });
                for (auto& th : pool) th.join();
            }

            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                ExperimentRecord rec;
                rec.method = cfg.methods[mi];
                rec.K = K;
                rec.rho = rho;

                std::vector<double> amse_v, amse_p_v, time_v;
                for (int rep = 0; rep < mc; ++rep) {
                    const MethodResult& mr = reps[rep][mi];
                    result.losses.push_back(ReplicationLoss{rho, K, rep, mr.method, mr.amse,
                                                            mr.amse_p, mr.fit_seconds, mr.failed});
                    if (mr.failed) {
                        ++rec.failures;
                        continue;
                    }
                    amse_v.push_back(mr.amse);
                    amse_p_v.push_back(mr.amse_p);
                    time_v.push_back(mr.fit_seconds);
                }

                const auto mean_of = [](const std::vector<double>& v) {
                    double acc = 0.0;
                    for (double x : v) acc += x;
                    return v.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : acc / static_cast<double>(v.size());
                };
                const auto se_of = [&](const std::vector<double>& v, double mean) {
                    if (v.size() < 2) return 0.0;
                    double acc = 0.0;
                    for (double x : v) acc += (x - mean) * (x - mean);
                    const double sd = std::sqrt(acc / static_cast<double>(v.size() - 1));
                    return sd / std::sqrt(static_cast<double>(v.size()));
                };

                rec.mean_amse = mean_of(amse_v);
                rec.se_amse = se_of(amse_v, rec.mean_amse);
                rec.mean_amse_p = mean_of(amse_p_v);
                rec.se_amse_p = se_of(amse_p_v, rec.mean_amse_p);
                rec.mean_fit_seconds = mean_of(time_v);
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

}  // namespace fplsr
