#include "adsvol/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace adsvol::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v, int digits = 2) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

// "--" may not appear inside an XML comment.
std::string comment_safe(std::string s) {
    for (std::size_t p = s.find("--"); p != std::string::npos; p = s.find("--", p)) s.replace(p, 2, "- -");
    return s;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        const double d = 0.05 * (hi - lo);
        lo -= d;
        hi += d;
    }
};

}  // namespace

std::string render(const SmilePlot& plot) {
    const double left = 70, right = 150, top = 40, bottom = 55;
    const double pw = plot.width - left - right, ph = plot.height - top - bottom;

    Range xr, yr;
    for (std::size_t i = 0; i < plot.observed.x.size(); ++i) {
        xr.add(plot.observed.x[i]);
        yr.add(plot.observed.y[i]);
    }
    for (const auto& c : plot.curves)
        for (std::size_t i = 0; i < c.x.size(); ++i)
            if (std::isfinite(c.y[i])) xr.add(c.x[i]), yr.add(c.y[i]);
    xr.pad();
    yr.pad();
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return top + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (!plot.comment.empty()) os << "<!-- " << comment_safe(plot.comment) << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\""
       << plot.height << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"15\">" << escape(plot.title) << "</text>\n";

    // axes, ticks, labels
    os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
       << fmt(top + ph) << "\"/>\n";
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\""
       << fmt(top + ph) << "\"/>\n";
    os << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        os << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(px(xv))
           << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
           << fmt(xv, 3) << "</text>\n";
        os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(left)
           << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
           << fmt(yv, 3) << "</text>\n";
    }
    os << "<text class=\"xlabel\" x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(plot.height - 12)
       << "\" text-anchor=\"middle\" font-size=\"13\">moneyness</text>\n";
    os << "<text class=\"ylabel\" x=\"18\" y=\"" << fmt(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"13\" "
       << "transform=\"rotate(-90 18 " << fmt(top + ph / 2) << ")\">IV</text>\n";
    os << "</g>\n";

    for (std::size_t ci = 0; ci < plot.curves.size(); ++ci) {
        const auto& c = plot.curves[ci];
        const char* color = kPalette[ci % std::size(kPalette)];
        os << "<g class=\"curve\" data-label=\"" << escape(c.label) << "\" stroke=\"" << color
           << "\" stroke-width=\"1.8\" fill=\"none\">\n";
        std::string pts;
        auto flush = [&] {
            if (!pts.empty()) os << "<polyline points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (!std::isfinite(c.y[i])) {
                flush();
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += fmt(px(c.x[i])) + ',' + fmt(py(c.y[i]));
        }
        flush();
        os << "</g>\n";
    }

    os << "<g class=\"observed\" data-label=\"" << escape(plot.observed.label) << "\" fill=\"black\">\n";
    for (std::size_t i = 0; i < plot.observed.x.size(); ++i) {
        if (!std::isfinite(plot.observed.y[i])) continue;
        os << "<circle cx=\"" << fmt(px(plot.observed.x[i])) << "\" cy=\"" << fmt(py(plot.observed.y[i]))
           << "\" r=\"3\"/>\n";
    }
    os << "</g>\n";

    // legend
    const double lx = left + pw + 15;
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<circle cx=\"" << fmt(lx + 10) << "\" cy=\"" << fmt(top + 10) << "\" r=\"3\" fill=\"black\"/>\n";
    os << "<text x=\"" << fmt(lx + 25) << "\" y=\"" << fmt(top + 14) << "\">" << escape(plot.observed.label)
       << "</text>\n";
    for (std::size_t ci = 0; ci < plot.curves.size(); ++ci) {
        const double y = top + 10 + 20.0 * static_cast<double>(ci + 1);
        os << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(y)
           << "\" stroke=\"" << kPalette[ci % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << fmt(lx + 25) << "\" y=\"" << fmt(y + 4) << "\">" << escape(plot.curves[ci].label)
           << "</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace adsvol::svg
