#pragma once

// Minimal deterministic SVG line plots. All numbers are emitted through fixed
// printf formats, so a given plot description always renders to identical
// bytes; that is what the golden-file tests pin down.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace fplsr::svg {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Range {
    double lo = 0.0, hi = 1.0;
};

inline Range span(const std::vector<const std::vector<double>*>& columns) {
    bool any = false;
    double lo = 0.0, hi = 0.0;
    for (const auto* col : columns)
        for (double v : col ? *col : std::vector<double>{}) {
            if (!std::isfinite(v)) continue;
            if (!any) {
                lo = hi = v;
                any = true;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    if (!any) return {0.0, 1.0};
    if (lo == hi) return {lo - 0.5, hi + 0.5};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace detail

// Renders one panel's inner markup at the given offset. Kept separate so a
// multi-panel figure can lay several plots side by side in one document.
inline std::string render_panel(const LinePlot& plot, double x0, double y0, double width,
                                double height) {
    using detail::num;
    const double ml = 62.0, mr = 18.0, mt = 34.0, mb = 46.0;
    const double px = x0 + ml, py = y0 + mt;
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : plot.series) {
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const detail::Range rx = detail::span(xs), ry = detail::span(ys);
    const auto map_x = [&](double v) { return px + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    const auto map_y = [&](double v) { return py + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::string out;
    out += "<g>\n";
    out += "<text x=\"" + num(px + pw / 2) + "\" y=\"" + num(y0 + 18.0) +
           "\" text-anchor=\"middle\" class=\"title\">" + plot.title + "</text>\n";
    out += "<rect x=\"" + num(px) + "\" y=\"" + num(py) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#444444\"/>\n";

    const int n_ticks = 5;
    for (int i = 0; i < n_ticks; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / (n_ticks - 1);
        const double gx = map_x(fx);
        out += "<line x1=\"" + num(gx) + "\" y1=\"" + num(py + ph) + "\" x2=\"" + num(gx) +
               "\" y2=\"" + num(py + ph + 5) + "\" stroke=\"#444444\"/>\n";
        out += "<text x=\"" + num(gx) + "\" y=\"" + num(py + ph + 18) +
               "\" text-anchor=\"middle\" class=\"tick\">" + detail::tick_label(fx) + "</text>\n";

        const double fy = ry.lo + (ry.hi - ry.lo) * i / (n_ticks - 1);
        const double gy = map_y(fy);
        out += "<line x1=\"" + num(px - 5) + "\" y1=\"" + num(gy) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(gy) + "\" stroke=\"#444444\"/>\n";
        out += "<text x=\"" + num(px - 8) + "\" y=\"" + num(gy + 4) +
               "\" text-anchor=\"end\" class=\"tick\">" + detail::tick_label(fy) + "</text>\n";
    }
    out += "<text x=\"" + num(px + pw / 2) + "\" y=\"" + num(py + ph + 36) +
           "\" text-anchor=\"middle\" class=\"axis\">" + plot.x_label + "</text>\n";
    out += "<text x=\"" + num(x0 + 14.0) + "\" y=\"" + num(py + ph / 2) +
           "\" text-anchor=\"middle\" class=\"axis\" transform=\"rotate(-90 " + num(x0 + 14.0) +
           " " + num(py + ph / 2) + ")\">" + plot.y_label + "</text>\n";

    for (const auto& s : plot.series) {
        if (s.x.empty()) continue;
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!points.empty()) points += ' ';
            points += num(map_x(s.x[i])) + "," + num(map_y(s.y[i]));
        }
        out += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.5\"/>\n";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            out += "<circle cx=\"" + num(map_x(s.x[i])) + "\" cy=\"" + num(map_y(s.y[i])) +
                   "\" r=\"2.5\" fill=\"" + s.color + "\"/>\n";
    }
    out += "</g>\n";
    return out;
}

// One SVG document laying the given panels out horizontally, with a shared
// legend on the right edge (one entry per distinct label, first color wins).
inline std::string render(const std::vector<LinePlot>& panels, double panel_width = 460.0,
                          double panel_height = 380.0) {
    using detail::num;
    const double legend_width = 120.0;
    const double width = panel_width * static_cast<double>(std::max<std::size_t>(panels.size(), 1)) +
                         legend_width;
    const double height = panel_height;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    out += "<style>text{font-family:sans-serif}.title{font-size:14px}.axis{font-size:12px}"
           ".tick{font-size:10px}.legend{font-size:12px}</style>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" fill=\"#ffffff\"/>\n";

    for (std::size_t i = 0; i < panels.size(); ++i)
        out += render_panel(panels[i], panel_width * static_cast<double>(i), 0.0, panel_width,
                            panel_height);

    std::vector<std::pair<std::string, std::string>> entries;  // label, color
    for (const auto& p : panels)
        for (const auto& s : p.series) {
            bool seen = false;
            for (const auto& e : entries) seen = seen || e.first == s.label;
            if (!seen) entries.emplace_back(s.label, s.color);
        }
    const double lx = width - legend_width + 8.0;
    double ly = 40.0;
    for (const auto& [label, color] : entries) {
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 24) +
               "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly) + "\" class=\"legend\">" + label +
               "</text>\n";
        ly += 20.0;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace fplsr::svg
