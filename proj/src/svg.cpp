#include "nonstat/svg.hpp"

#include "nonstat/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nonstat {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 40.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string line_chart_svg(const MultivariateSeries& s, const std::vector<Index>& change_points,
                           const std::string& title) {
    const auto& v = s.values();
    double lo = v.minCoeff();
    double hi = v.maxCoeff();
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const Index n = s.length();
    const double plot_w = kWidth - 2 * kMargin;
    const double plot_h = kHeight - 2 * kMargin;
    auto xpos = [&](double t) { return kMargin + (n > 1 ? (t - 1) / static_cast<double>(n - 1) : 0.5) * plot_w; };
    auto ypos = [&](double y) { return kMargin + (hi - y) / (hi - lo) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"#999\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << kMargin << "\" y=\"" << kMargin - 12 << "\" font-family=\"sans-serif\" font-size=\"14\">"
            << escape(title) << "</text>\n";
    }
    out << "<text x=\"4\" y=\"" << num(kMargin + 4) << "\" font-family=\"sans-serif\" font-size=\"10\">" << num(hi)
        << "</text>\n";
    out << "<text x=\"4\" y=\"" << num(kMargin + plot_h) << "\" font-family=\"sans-serif\" font-size=\"10\">"
        << num(lo) << "</text>\n";

    for (Index c = 0; c < s.dimension(); ++c) {
        out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << kPalette[c % 6] << "\" points=\"";
        for (Index t = 0; t < n; ++t) {
            if (t) out << ' ';
            out << num(xpos(static_cast<double>(t + 1))) << ',' << num(ypos(v(t, c)));
        }
        out << "\"><title>" << escape(s.names()[static_cast<std::size_t>(c)]) << "</title></polyline>\n";
    }
    for (Index tau : change_points) {
        const double x = xpos(static_cast<double>(tau) + 0.5);
        out << "<line x1=\"" << num(x) << "\" x2=\"" << num(x) << "\" y1=\"" << kMargin << "\" y2=\""
            << kMargin + plot_h << "\" stroke=\"black\" stroke-dasharray=\"4 3\"><title>" << tau
            << "</title></line>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void write_svg_file(const std::string& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << svg;
}

}  // namespace nonstat
