#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace fpme::app {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

namespace detail {

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out.push_back(c);
        }
    }
    return out;
}

} // namespace detail

/// Static log-log line plot.  Non-positive points are skipped.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<PlotSeries>& series)
{
    constexpr double W = 720;
    constexpr double H = 480;
    constexpr double ml = 80;
    constexpr double mr = 170;
    constexpr double mt = 40;
    constexpr double mb = 60;
    double x0 = INFINITY;
    double x1 = -INFINITY;
    double y0 = INFINITY;
    double y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (s.x[i] > 0 && s.y[i] > 0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                x0 = std::min(x0, std::log10(s.x[i]));
                x1 = std::max(x1, std::log10(s.x[i]));
                y0 = std::min(y0, std::log10(s.y[i]));
                y1 = std::max(y1, std::log10(s.y[i]));
            }
        }
    }
    if (!(x1 >= x0) || !(y1 >= y0)) {
        x0 = y0 = 0;
        x1 = y1 = 1;
    }
    x0 = std::floor(x0);
    x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0);
    y1 = std::max(std::ceil(y1), y0 + 1);
    auto px = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - y0) / (y1 - y0) * (H - mt - mb); };
    using detail::fmt;
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
                      "font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(W / 2 - 60) + "\" y=\"24\" font-size=\"15\">" + detail::xml_escape(title) + "</text>\n";
    for (double e = x0; e <= x1 + 1e-9; e += 1) {
        out += "<line x1=\"" + fmt(px(e)) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(px(e)) + "\" y2=\"" +
               fmt(H - mb) + "\" stroke=\"#ddd\"/>\n";
        out += "<text x=\"" + fmt(px(e) - 12) + "\" y=\"" + fmt(H - mb + 18) + "\">1e" +
               std::to_string(static_cast<int>(e)) + "</text>\n";
    }
    for (double e = y0; e <= y1 + 1e-9; e += 1) {
        out += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(e)) + "\" x2=\"" + fmt(W - mr) + "\" y2=\"" +
               fmt(py(e)) + "\" stroke=\"#ddd\"/>\n";
        out += "<text x=\"" + fmt(ml - 45) + "\" y=\"" + fmt(py(e) + 4) + "\">1e" +
               std::to_string(static_cast<int>(e)) + "</text>\n";
    }
    out += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(W - ml - mr) + "\" height=\"" +
           fmt(H - mt - mb) + "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + fmt((ml + W - mr) / 2) + "\" y=\"" + fmt(H - 15) + "\">" + detail::xml_escape(xlabel) +
           "</text>\n";
    out += "<text x=\"18\" y=\"" + fmt((mt + H - mb) / 2) + "\" transform=\"rotate(-90 18 " +
           fmt((mt + H - mb) / 2) + ")\">" + detail::xml_escape(ylabel) + "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (s.x[i] > 0 && s.y[i] > 0 && std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                pts += fmt(px(std::log10(s.x[i]))) + "," + fmt(py(std::log10(s.y[i]))) + " ";
            }
        }
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\"" +
               (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + " points=\"" + pts + "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(k);
        out += "<line x1=\"" + fmt(W - mr + 10) + "\" y1=\"" + fmt(ly - 4) + "\" x2=\"" + fmt(W - mr + 35) +
               "\" y2=\"" + fmt(ly - 4) + "\" stroke=\"" + color + "\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") +
               "/>\n";
        out += "<text x=\"" + fmt(W - mr + 40) + "\" y=\"" + fmt(ly) + "\">" + detail::xml_escape(s.label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace fpme::app
