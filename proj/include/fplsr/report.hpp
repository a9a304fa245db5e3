#pragma once

// Turns an experiment record table into the result artifacts: one figure per
// rho showing fitted and held-out error against K for every method, a timing
// figure, and a plain-text summary. Pure function of the records, so the
// emitted bytes are fixed by the input file alone.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "fplsr/simlab.hpp"
#include "fplsr/svg.hpp"

namespace fplsr::report {

namespace detail {

inline const char* method_color(FfrAlgorithm m) {
    switch (m) {
        case FfrAlgorithm::nipals: return "#1f77b4";
        case FfrAlgorithm::simpls: return "#d62728";
        case FfrAlgorithm::ridge: return "#2ca02c";
    }
    return "#000000";
}

inline std::vector<double> sorted_unique_rho(const std::vector<ExperimentRecord>& records) {
    std::vector<double> rho;
    for (const auto& r : records)
        if (std::find(rho.begin(), rho.end(), r.rho) == rho.end()) rho.push_back(r.rho);
    std::sort(rho.begin(), rho.end());
    return rho;
}

inline std::vector<int> sorted_unique_K(const std::vector<ExperimentRecord>& records) {
    std::vector<int> ks;
    for (const auto& r : records)
        if (std::find(ks.begin(), ks.end(), r.K) == ks.end()) ks.push_back(r.K);
    std::sort(ks.begin(), ks.end());
    return ks;
}

inline std::vector<FfrAlgorithm> methods_present(const std::vector<ExperimentRecord>& records) {
    std::vector<FfrAlgorithm> out;
    for (FfrAlgorithm m : {FfrAlgorithm::nipals, FfrAlgorithm::simpls, FfrAlgorithm::ridge})
        for (const auto& r : records)
            if (r.method == m) {
                out.push_back(m);
                break;
            }
    return out;
}

inline std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace detail

// Named output files as (file name, content) pairs.
inline std::vector<std::pair<std::string, std::string>> render_report(
    const std::vector<ExperimentRecord>& records) {
    std::vector<std::pair<std::string, std::string>> files;
    const auto rhos = detail::sorted_unique_rho(records);
    const auto ks = detail::sorted_unique_K(records);
    const auto methods = detail::methods_present(records);

    const auto cell = [&](FfrAlgorithm m, int K, double rho) -> const ExperimentRecord* {
        for (const auto& r : records)
            if (r.method == m && r.K == K && r.rho == rho) return &r;
        return nullptr;
    };

    for (double rho : rhos) {
        svg::LinePlot amse_panel, amse_p_panel;
        amse_panel.title = "AMSE, rho = " + detail::short_num(rho);
        amse_p_panel.title = "AMSE_p, rho = " + detail::short_num(rho);
        amse_panel.x_label = amse_p_panel.x_label = "K";
        amse_panel.y_label = "mean AMSE";
        amse_p_panel.y_label = "mean AMSE_p";
        for (FfrAlgorithm m : methods) {
            svg::Series sa{algorithm_name(m), detail::method_color(m), {}, {}};
            svg::Series sp = sa;
            for (int K : ks) {
                const ExperimentRecord* r = cell(m, K, rho);
                if (r == nullptr) continue;
                if (std::isfinite(r->mean_amse)) {
                    sa.x.push_back(K);
                    sa.y.push_back(r->mean_amse);
                }
                if (std::isfinite(r->mean_amse_p)) {
                    sp.x.push_back(K);
                    sp.y.push_back(r->mean_amse_p);
                }
            }
            amse_panel.series.push_back(std::move(sa));
            amse_p_panel.series.push_back(std::move(sp));
        }
        files.emplace_back("errors_rho_" + detail::short_num(rho) + ".svg",
                           svg::render({amse_panel, amse_p_panel}));
    }

    // Timing: per method, fit seconds against K averaged over rho in fixed
    // ascending-rho order.
    svg::LinePlot timing;
    timing.title = "Mean fit time";
    timing.x_label = "K";
    timing.y_label = "seconds";
    for (FfrAlgorithm m : methods) {
        svg::Series s{algorithm_name(m), detail::method_color(m), {}, {}};
        for (int K : ks) {
            double acc = 0.0;
            int n = 0;
            for (double rho : rhos) {
                const ExperimentRecord* r = cell(m, K, rho);
                if (r != nullptr && std::isfinite(r->mean_fit_seconds)) {
                    acc += r->mean_fit_seconds;
                    ++n;
                }
            }
            if (n > 0) {
                s.x.push_back(K);
                s.y.push_back(acc / n);
            }
        }
        timing.series.push_back(std::move(s));
    }
    files.emplace_back("timing.svg", svg::render({timing}));

    std::string summary;
    summary += "experiment summary\n";
    summary += "==================\n";
    char line[256];
    std::snprintf(line, sizeof line, "cells: %zu\n", records.size());
    summary += line;
    for (double rho : rhos) {
        summary += "\nrho = " + detail::short_num(rho) + "\n";
        std::snprintf(line, sizeof line, "  %-8s %4s %12s %10s %12s %10s %10s %9s\n", "method",
                      "K", "mean_amse", "se", "mean_amse_p", "se", "fit_sec", "failures");
        summary += line;
        for (FfrAlgorithm m : methods)
            for (int K : ks) {
                const ExperimentRecord* r = cell(m, K, rho);
                if (r == nullptr) continue;
                std::snprintf(line, sizeof line,
                              "  %-8s %4d %12.6g %10.4g %12.6g %10.4g %10.4g %9d\n",
                              algorithm_name(m), K, r->mean_amse, r->se_amse, r->mean_amse_p,
                              r->se_amse_p, r->mean_fit_seconds, r->failures);
                summary += line;
            }
    }
    files.emplace_back("summary.txt", std::move(summary));
    return files;
}

}  // namespace fplsr::report
