#include "probe/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace probe {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, const std::string& name, bool dashed) {
    series_.push_back({x, y, color, name, dashed, false});
}

void SvgPlot::add_markers(const std::vector<double>& x, const std::vector<double>& y,
                          const std::string& color, const std::string& name) {
    series_.push_back({x, y, color, name, false, true});
}

void SvgPlot::write(const std::string& path) const {
    const double W = 720, H = 480, ml = 70, mr = 20, mt = 40, mb = 55;
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmin < xmax)) {
        xmin -= 1;
        xmax += 1;
    }
    if (!(ymin < ymax)) {
        ymin -= 1;
        ymax += 1;
    }
    const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto X = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title_ << "</text>\n";
    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        out << "<text x=\"" << X(fx) << "\" y=\"" << H - mb + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(fx) << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << Y(fy) + 4
            << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(fy) << "</text>\n";
        out << "<line x1=\"" << X(fx) << "\" y1=\"" << H - mb << "\" x2=\"" << X(fx) << "\" y2=\""
            << H - mb + 4 << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << Y(fy) << "\" x2=\"" << ml << "\" y2=\""
            << Y(fy) << "\" stroke=\"black\"/>\n";
    }
    out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (mt + H - mb) / 2 << ")\">" << ylabel_ << "</text>\n";

    double ly = mt + 8;
    for (const auto& s : series_) {
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
                    << "\" r=\"3.5\" fill=\"" << s.color << "\"/>\n";
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\""
                << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                out << fmt(X(s.x[i])) << ',' << fmt(Y(s.y[i])) << ' ';
            }
            out << "\"/>\n";
        }
        out << "<text x=\"" << W - mr - 6 << "\" y=\"" << ly
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.name
            << "</text>\n";
        ly += 14;
    }
    out << "</svg>\n";
}

}  // namespace probe
