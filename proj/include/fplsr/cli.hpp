#pragma once

// Command implementations behind the fplsr binary. Each command is an
// ordinary function taking an argument struct, so tests drive them in-process
// and the binary's main() is a thin argv parser. Every invocation writes a
// manifest describing inputs, seed, and tool version next to its outputs.
//
// Exit codes: 0 success, 2 bad input or configuration, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fplsr/error.hpp"
#include "fplsr/ffrm.hpp"
#include "fplsr/io.hpp"
#include "fplsr/report.hpp"
#include "fplsr/simlab.hpp"

namespace fplsr::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunManifest {
    std::string command;
    std::string config_path;           // empty when the command takes no config
    std::vector<std::string> inputs;   // every file read
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    double duration_seconds = 0.0;
};

inline io::json manifest_to_json(const RunManifest& m) {
    io::json j;
    j["command"] = m.command;
    j["config"] = m.config_path;
    j["inputs"] = m.inputs;
    j["out_dir"] = m.out_dir;
    if (m.seed)
        j["seed"] = *m.seed;
    else
        j["seed"] = nullptr;
    j["tool_version"] = kVersion;
    j["duration_seconds"] = m.duration_seconds;
    return j;
}

namespace detail {

inline void write_output(const std::string& out_dir, const std::string& name,
                         const std::string& content) {
    io::save_text_file((std::filesystem::path(out_dir) / name).string(), content);
}

inline void finish_manifest(RunManifest& m, std::chrono::steady_clock::time_point t0) {
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_output(m.out_dir, "manifest.json", manifest_to_json(m).dump(2) + "\n");
}

inline std::vector<double> uniform_grid(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1.0);
    return g;
}

// Smooths one CSV variable. A single --nbasis entry fixes K; several entries
// form the candidate list for GCV selection.
inline CurveSet smooth_variable(const io::CurveTable& table, const std::vector<int>& nbasis) {
    if (table.argvals.size() < 2)
        throw std::invalid_argument("curve csv: need at least two argument values");
    const double a = table.argvals.front(), b = table.argvals.back();
    if (!(a < b)) throw std::invalid_argument("curve csv: argvals must increase");
    int K;
    if (nbasis.empty())
        throw std::invalid_argument("--nbasis is required");
    else if (nbasis.size() == 1)
        K = nbasis[0];
    else
        K = select_n_basis(table.obs, table.argvals, a, b, nbasis, default_lambda_grid()).n_basis;
    const auto bs = make_bspline(a, b, K, 4);
    return smooth_curves(table.obs, table.argvals, bs, default_lambda_grid()).first;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;  // overrides the config seed
};

inline int run_simulate(const SimulateArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentGrid grid = io::experiment_grid_from_json(io::load_json_file(args.config_path));
    if (args.seed) grid.base.seed = *args.seed;

    const ExperimentResult result = run_experiment(grid);

    std::filesystem::create_directories(args.out_dir);
    std::ostringstream exp_csv, loss_csv;
    io::write_experiment_csv(exp_csv, result.records);
    io::write_losses_csv(loss_csv, result.losses);
    detail::write_output(args.out_dir, "experiment.csv", exp_csv.str());
    detail::write_output(args.out_dir, "losses.csv", loss_csv.str());

    RunManifest m;
    m.command = "simulate";
    m.config_path = args.config_path;
    m.inputs = {args.config_path};
    m.out_dir = args.out_dir;
    m.seed = grid.base.seed;
    detail::finish_manifest(m, t0);
    return 0;
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

struct FitArgs {
    std::string response_csv;
    std::vector<std::string> predictor_csvs;
    std::string out_dir;
    std::vector<int> nbasis;  // one value fixes K; several form a GCV candidate list
    int components = 5;
    FfrAlgorithm method = FfrAlgorithm::simpls;
    io::Orientation orientation = io::Orientation::col;
    int grid = 101;  // surface evaluation grid per axis
};

inline int run_fit(const FitArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    if (args.predictor_csvs.empty()) throw std::invalid_argument("fit: no predictor files given");
    if (args.grid < 2) throw std::invalid_argument("fit: --grid must be >= 2");

    const io::CurveTable ytab = io::read_curve_csv_file(args.response_csv, args.orientation);
    const CurveSet yset = detail::smooth_variable(ytab, args.nbasis);
    std::vector<CurveSet> xsets;
    for (const auto& path : args.predictor_csvs)
        xsets.push_back(
            detail::smooth_variable(io::read_curve_csv_file(path, args.orientation), args.nbasis));

    const int h = args.method == FfrAlgorithm::ridge ? 0 : args.components;
    const FfrModel model = fit_ffr(yset, xsets, h, args.method);

    std::filesystem::create_directories(args.out_dir);
    detail::write_output(args.out_dir, "model.json", io::ffr_to_json(model).dump() + "\n");

    const auto tg =
        detail::uniform_grid(model.response_basis.a, model.response_basis.b, args.grid);
    for (std::size_t mi = 0; mi < model.blocks.size(); ++mi) {
        const auto& bs = model.blocks[mi].basis;
        const auto sg = detail::uniform_grid(bs.a, bs.b, args.grid);
        const Eigen::MatrixXd surf = coefficient_surface(model, static_cast<Eigen::Index>(mi), sg, tg);
        std::ostringstream os;
        os << "s,t,value\n";
        for (std::size_t i = 0; i < sg.size(); ++i)
            for (std::size_t j = 0; j < tg.size(); ++j)
                os << io::format_double(sg[i]) << ',' << io::format_double(tg[j]) << ','
                   << io::format_double(surf(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(j)))
                   << '\n';
        detail::write_output(args.out_dir, "beta_" + std::to_string(mi + 1) + ".csv", os.str());
    }

    RunManifest m;
    m.command = "fit";
    m.inputs = {args.response_csv};
    m.inputs.insert(m.inputs.end(), args.predictor_csvs.begin(), args.predictor_csvs.end());
    m.out_dir = args.out_dir;
    detail::finish_manifest(m, t0);
    return 0;
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

struct PredictArgs {
    std::string model_path;
    std::vector<std::string> predictor_csvs;
    std::string truth_csv;  // optional observed responses; triggers the AMSE_p line
    std::string out_dir;
    io::Orientation orientation = io::Orientation::col;
    int grid = 0;  // 0: evaluate on the first predictor's argvals
};

inline int run_predict(const PredictArgs& args, std::ostream& out = std::cout) {
    const auto t0 = std::chrono::steady_clock::now();
    if (args.predictor_csvs.empty())
        throw std::invalid_argument("predict: no predictor files given");

    const FfrModel model = io::ffr_from_json(io::load_json_file(args.model_path));
    if (args.predictor_csvs.size() != model.blocks.size())
        throw std::invalid_argument("predict: model expects " +
                                    std::to_string(model.blocks.size()) + " predictor file(s)");

    std::vector<io::CurveTable> tables;
    std::vector<CurveSet> xsets;
    for (std::size_t mi = 0; mi < args.predictor_csvs.size(); ++mi) {
        tables.push_back(io::read_curve_csv_file(args.predictor_csvs[mi], args.orientation));
        xsets.push_back(smooth_curves(tables.back().obs, tables.back().argvals,
                                      model.blocks[mi].basis, default_lambda_grid())
                            .first);
    }
    const CurveSet pred = predict_response(model, xsets);

    const std::vector<double> tgrid =
        args.grid > 0
            ? detail::uniform_grid(model.response_basis.a, model.response_basis.b, args.grid)
            : tables.front().argvals;

    io::CurveTable out_table;
    out_table.argvals = tgrid;
    out_table.ids = tables.front().ids;
    out_table.obs = eval_curves(pred, tgrid);

    std::filesystem::create_directories(args.out_dir);
    std::ostringstream os;
    io::write_curve_csv(os, out_table, args.orientation);
    detail::write_output(args.out_dir, "predictions.csv", os.str());

    if (!args.truth_csv.empty()) {
        const io::CurveTable truth = io::read_curve_csv_file(args.truth_csv, args.orientation);
        const CurveSet truth_set =
            smooth_curves(truth.obs, truth.argvals, model.response_basis, default_lambda_grid())
                .first;
        out << "AMSE_p = " << io::format_double(amse(truth_set, pred)) << "\n";
    }

    RunManifest m;
    m.command = "predict";
    m.inputs = {args.model_path};
    m.inputs.insert(m.inputs.end(), args.predictor_csvs.begin(), args.predictor_csvs.end());
    if (!args.truth_csv.empty()) m.inputs.push_back(args.truth_csv);
    m.out_dir = args.out_dir;
    detail::finish_manifest(m, t0);
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
    std::string experiment_csv;
    std::string out_dir;
};

inline int run_report(const ReportArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    std::ifstream is(args.experiment_csv);
    if (!is) throw std::invalid_argument("cannot open file: " + args.experiment_csv);
    std::vector<ExperimentRecord> records;
    try {
        records = io::read_experiment_csv(is);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(args.experiment_csv + ": " + e.what());
    }

    std::filesystem::create_directories(args.out_dir);
    for (const auto& [name, content] : report::render_report(records))
        detail::write_output(args.out_dir, name, content);

    RunManifest m;
    m.command = "report";
    m.inputs = {args.experiment_csv};
    m.out_dir = args.out_dir;
    detail::finish_manifest(m, t0);
    return 0;
}

// Maps exceptions onto the documented exit codes. Invalid inputs and configs
// are 2, numerical breakdowns are 3.
template <typename Fn>
inline int guarded(Fn&& fn, std::ostream& err = std::cerr) {
    try {
        return fn();
    } catch (const numerical_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const io::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numerical error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace fplsr::cli
