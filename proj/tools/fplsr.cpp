// Command line front end. Parsing lives here; the commands themselves are
// plain functions in fplsr/cli.hpp so the test suite can call them directly.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "fplsr/cli.hpp"

namespace {

fplsr::io::Orientation parse_orientation(const std::string& s) {
    return s == "row" ? fplsr::io::Orientation::row : fplsr::io::Orientation::col;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Function-on-function regression by partial least squares"};
    app.set_version_flag("--version", fplsr::cli::kVersion);
    app.require_subcommand(1);

    fplsr::cli::SimulateArgs sim;
    std::uint64_t seed_value = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Run the Monte-Carlo experiment grid");
    sim_cmd->add_option("--config", sim.config_path, "Experiment config JSON")->required();
    auto* seed_opt = sim_cmd->add_option("--seed", seed_value, "Master seed override");
    sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();

    fplsr::cli::FitArgs fit;
    std::string fit_method = "simpls", fit_orientation = "col";
    auto* fit_cmd = app.add_subcommand("fit", "Smooth curve CSVs and fit a regression model");
    fit_cmd->add_option("response", fit.response_csv, "Response curve CSV")->required();
    fit_cmd->add_option("predictors", fit.predictor_csvs, "Predictor curve CSVs")->required();
    fit_cmd->add_option("--out", fit.out_dir, "Output directory")->required();
    fit_cmd->add_option("--nbasis", fit.nbasis,
                        "Basis count; several comma-separated values form a GCV candidate list")
        ->required()
        ->delimiter(',');
    fit_cmd->add_option("--components", fit.components, "PLS components (default 5)");
    fit_cmd->add_option("--method", fit_method, "nipals, simpls, or ridge")
        ->check(CLI::IsMember({"nipals", "simpls", "ridge"}));
    fit_cmd->add_option("--orientation", fit_orientation, "Curve CSV layout")
        ->check(CLI::IsMember({"col", "row"}));
    fit_cmd->add_option("--grid", fit.grid, "Surface evaluation points per axis (default 101)");

    fplsr::cli::PredictArgs pred;
    std::string pred_orientation = "col";
    auto* pred_cmd = app.add_subcommand("predict", "Predict response curves for new predictors");
    pred_cmd->add_option("model", pred.model_path, "model.json from fit")->required();
    pred_cmd->add_option("predictors", pred.predictor_csvs, "Predictor curve CSVs")->required();
    pred_cmd->add_option("--truth", pred.truth_csv, "Observed responses; prints AMSE_p");
    pred_cmd->add_option("--out", pred.out_dir, "Output directory")->required();
    pred_cmd->add_option("--orientation", pred_orientation, "Curve CSV layout")
        ->check(CLI::IsMember({"col", "row"}));
    pred_cmd->add_option("--grid", pred.grid,
                         "Evaluate predictions on this many uniform points instead of the "
                         "input argvals");

    fplsr::cli::ReportArgs rep;
    auto* rep_cmd = app.add_subcommand("report", "Render figures and a summary from experiment.csv");
    rep_cmd->add_option("experiment", rep.experiment_csv, "experiment.csv from simulate")
        ->required();
    rep_cmd->add_option("--out", rep.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    return fplsr::cli::guarded([&]() -> int {
        if (sim_cmd->parsed()) {
            if (seed_opt->count() > 0) sim.seed = seed_value;
            return fplsr::cli::run_simulate(sim);
        }
        if (fit_cmd->parsed()) {
            fit.method = fplsr::algorithm_from_name(fit_method);
            fit.orientation = parse_orientation(fit_orientation);
            return fplsr::cli::run_fit(fit);
        }
        if (pred_cmd->parsed()) {
            pred.orientation = parse_orientation(pred_orientation);
            return fplsr::cli::run_predict(pred);
        }
        return fplsr::cli::run_report(rep);
    });
}
