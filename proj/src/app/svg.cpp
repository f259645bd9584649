#include "surrscope/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace surrscope::svg {

namespace {

constexpr double kLeft = 64.0;
constexpr double kRight = 120.0;
constexpr double kTop = 28.0;
constexpr double kBottom = 44.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

const char* color(std::size_t i)
{
    return kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
}

struct Scale {
    double lo;
    double hi;
    double px_lo;
    double px_hi;
    bool log;

    double operator()(double v) const
    {
        const double a = log ? std::log10(lo) : lo;
        const double b = log ? std::log10(hi) : hi;
        const double t = ((log ? std::log10(v) : v) - a) / (b - a);
        return px_lo + t * (px_hi - px_lo);
    }
};

std::pair<double, double> padded(double lo, double hi, bool log)
{
    if (!(lo < hi)) {
        if (log) {
            return {lo / 2.0, hi * 2.0};
        }
        const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        return {lo - pad, hi + pad};
    }
    if (log) {
        return {lo, hi};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

std::string frame(const std::string& title, const std::string& x_label, const std::string& y_label, double width,
                  double height)
{
    std::string s;
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(width - kLeft - kRight)
         + "\" height=\"" + num(height - kTop - kBottom) + "\" fill=\"none\" stroke=\"#333\"/>\n";
    s += "<text x=\"" + num(width / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" + escape(title)
         + "</text>\n";
    s += "<text x=\"" + num(kLeft + (width - kLeft - kRight) / 2) + "\" y=\"" + num(height - 6)
         + "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
    s += "<text transform=\"translate(14," + num(kTop + (height - kTop - kBottom) / 2)
         + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">" + escape(y_label) + "</text>\n";
    return s;
}

} // namespace

std::string line_panel(const Axes& axes, const std::vector<Series>& series, double width, double height)
{
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (axes.log_x && !(s.x[i] > 0.0)) {
                continue;
            }
            x_lo = std::min(x_lo, s.x[i]);
            x_hi = std::max(x_hi, s.x[i]);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
            if (!s.lower.empty()) {
                y_lo = std::min(y_lo, s.lower[i]);
                y_hi = std::max(y_hi, s.upper[i]);
            }
        }
    }
    if (!std::isfinite(x_lo)) {
        x_lo = axes.log_x ? 1.0 : 0.0;
        x_hi = x_lo;
        y_lo = y_hi = 0.0;
    }
    auto [xa, xb] = padded(x_lo, x_hi, axes.log_x);
    auto [ya, yb] = padded(y_lo, y_hi, false);
    ya = axes.y_min.value_or(ya);
    yb = axes.y_max.value_or(yb);
    const Scale sx{xa, xb, kLeft, width - kRight, axes.log_x};
    const Scale sy{ya, yb, height - kBottom, kTop, false};

    std::string out = frame(axes.title, axes.x_label, axes.y_label, width, height);
    for (int k = 0; k <= 4; ++k) {
        const double yv = ya + (yb - ya) * k / 4.0;
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(yv) + 4)
               + "\" text-anchor=\"end\" font-size=\"10\">" + tick(yv) + "</text>\n";
        const double xv = axes.log_x ? std::pow(10.0, std::log10(xa) + (std::log10(xb) - std::log10(xa)) * k / 4.0)
                                     : xa + (xb - xa) * k / 4.0;
        out += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(height - kBottom + 14)
               + "\" text-anchor=\"middle\" font-size=\"10\">" + tick(xv) + "</text>\n";
    }
    if (ya < 0.0 && yb > 0.0) {
        out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(width - kRight) + "\" y1=\"" + num(sy(0.0)) + "\" y2=\""
               + num(sy(0.0)) + "\" stroke=\"#999\" stroke-dasharray=\"3,3\"/>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* c = color(si);
        if (!s.lower.empty() && s.lower.size() == s.x.size()) {
            std::string pts;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                pts += num(sx(s.x[i])) + "," + num(sy(s.upper[i])) + " ";
            }
            for (std::size_t i = s.x.size(); i-- > 0;) {
                pts += num(sx(s.x[i])) + "," + num(sy(s.lower[i])) + " ";
            }
            out += "<polygon points=\"" + pts + "\" fill=\"" + c + "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        }
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (axes.log_x && !(s.x[i] > 0.0)) {
                continue;
            }
            pts += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
            if (s.markers) {
                out += "<circle cx=\"" + num(sx(s.x[i])) + "\" cy=\"" + num(sy(s.y[i])) + "\" r=\"2.5\" fill=\"" + c
                       + "\"/>\n";
            }
        }
        out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.5\"/>\n";
        out += "<text x=\"" + num(width - kRight + 8) + "\" y=\"" + num(kTop + 12 + 14 * static_cast<double>(si))
               + "\" font-size=\"11\" fill=\"" + c + "\">" + escape(s.label) + "</text>\n";
    }
    return out;
}

std::string bar_panel(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, double width, double height)
{
    double lo = 0.0;
    double hi = 0.0;
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    auto [ya, yb] = padded(lo, hi, false);
    const Scale sy{ya, yb, height - kBottom, kTop, false};
    std::string out = frame(title, "feature", "coefficient", width, height);
    const double plot_w = width - kLeft - kRight;
    const double slot = values.empty() ? plot_w : plot_w / static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = kLeft + slot * (static_cast<double>(i) + 0.15);
        const double y0 = sy(0.0);
        const double y1 = sy(values[i]);
        out += "<rect x=\"" + num(x) + "\" y=\"" + num(std::min(y0, y1)) + "\" width=\"" + num(slot * 0.7)
               + "\" height=\"" + num(std::abs(y1 - y0)) + "\" fill=\"" + (values[i] >= 0.0 ? "#1f77b4" : "#d62728")
               + "\"/>\n";
        out += "<text x=\"" + num(x + slot * 0.35) + "\" y=\"" + num(height - kBottom + 14)
               + "\" text-anchor=\"middle\" font-size=\"10\">" + escape(i < labels.size() ? labels[i] : "") + "</text>\n";
    }
    out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(width - kRight) + "\" y1=\"" + num(sy(0.0)) + "\" y2=\""
           + num(sy(0.0)) + "\" stroke=\"#333\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double yv = ya + (yb - ya) * k / 4.0;
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(sy(yv) + 4)
               + "\" text-anchor=\"end\" font-size=\"10\">" + tick(yv) + "</text>\n";
    }
    return out;
}

std::string heatmap_panel(const std::string& title, const EvalGrid& grid, const BinaryLabels* overlay,
                          const std::vector<double>& instance, double radius, double width, double height)
{
    const auto& b = grid.bounds;
    const std::size_t res = grid.resolution;
    const Scale sx{b[0].min, b[0].max, kLeft, width - kRight, false};
    const Scale sy{b[1].min, b[1].max, height - kBottom, kTop, false};
    const double cw = (width - kLeft - kRight) / static_cast<double>(res - 1);
    const double ch = (height - kTop - kBottom) / static_cast<double>(res - 1);
    std::string out = frame(title, "x0", "x1", width, height);
    for (std::size_t r = 0; r < grid.points.rows(); ++r) {
        const auto p = grid.points.row(r);
        out += "<rect x=\"" + num(sx(p[0]) - cw / 2) + "\" y=\"" + num(sy(p[1]) - ch / 2) + "\" width=\"" + num(cw)
               + "\" height=\"" + num(ch) + "\" fill=\"" + (grid.labels[r] ? "#f4a582" : "#92c5de") + "\"/>\n";
    }
    if (overlay) {
        // Mark cell edges where the surrogate's label changes.
        for (std::size_t iy = 0; iy < res; ++iy) {
            for (std::size_t ix = 0; ix < res; ++ix) {
                const std::size_t r = iy * res + ix;
                const auto p = grid.points.row(r);
                if (ix + 1 < res && (*overlay)[r] != (*overlay)[r + 1]) {
                    const double x = sx(p[0]) + cw / 2;
                    out += "<line x1=\"" + num(x) + "\" x2=\"" + num(x) + "\" y1=\"" + num(sy(p[1]) - ch / 2)
                           + "\" y2=\"" + num(sy(p[1]) + ch / 2) + "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
                }
                if (iy + 1 < res && (*overlay)[r] != (*overlay)[r + res]) {
                    const double y = sy(p[1]) - ch / 2;
                    out += "<line x1=\"" + num(sx(p[0]) - cw / 2) + "\" x2=\"" + num(sx(p[0]) + cw / 2) + "\" y1=\""
                           + num(y) + "\" y2=\"" + num(y) + "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
                }
            }
        }
    }
    if (instance.size() == 2) {
        out += "<ellipse cx=\"" + num(sx(instance[0])) + "\" cy=\"" + num(sy(instance[1])) + "\" rx=\""
               + num(std::abs(sx(instance[0] + radius) - sx(instance[0]))) + "\" ry=\""
               + num(std::abs(sy(instance[1] + radius) - sy(instance[1])))
               + "\" fill=\"none\" stroke=\"#000\" stroke-dasharray=\"4,3\"/>\n";
        out += "<circle cx=\"" + num(sx(instance[0])) + "\" cy=\"" + num(sy(instance[1]))
               + "\" r=\"4\" fill=\"#000\"/>\n";
    }
    return out;
}

std::string document(const std::vector<std::string>& panels, double width, double panel_height)
{
    const double total = panel_height * static_cast<double>(panels.size());
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(total)
                      + "\" viewBox=\"0 0 " + num(width) + " " + num(total) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        out += "<g transform=\"translate(0," + num(panel_height * static_cast<double>(i)) + ")\">\n" + panels[i]
               + "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace surrscope::svg
