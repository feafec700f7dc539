#pragma once

// Minimal SVG writer on a fixed 800x800 viewport.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace kgeo::detail {

class SvgCanvas {
public:
    static constexpr double size = 800.0;
    static constexpr double margin = 60.0;

    SvgCanvas(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {}

    double px(double x) const { return margin + (x - x0_) / (x1_ - x0_) * (size - 2 * margin); }
    double py(double y) const { return size - margin - (y - y0_) / (y1_ - y0_) * (size - 2 * margin); }

    // Breaks the polyline wherever consecutive points jump by more than max_jump
    // (in data units), so wrapped coordinates do not draw spurious lines.
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color, double max_jump,
                  double width = 1.5) {
        std::vector<std::pair<double, double>> run;
        auto flush = [&] {
            if (run.size() >= 2) {
                body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
                      << "\" points=\"";
                for (const auto& [x, y] : run) body_ << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
                body_ << "\"/>\n";
            }
            run.clear();
        };
        for (size_t i = 0; i < pts.size(); ++i) {
            if (!run.empty()) {
                const auto& q = run.back();
                if (std::hypot(pts[i].first - q.first, pts[i].second - q.second) > max_jump) flush();
            }
            run.push_back(pts[i]);
        }
        flush();
    }

    void circle(double x, double y, double r, const std::string& color) {
        body_ << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"" << r << "\" fill=\"" << color
              << "\"/>\n";
    }

    void hline(double y, const std::string& color, const std::string& dash = "6,4") {
        body_ << "<line x1=\"" << fmt(px(x0_)) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(px(x1_))
              << "\" y2=\"" << fmt(py(y)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"" << dash << "\"/>\n";
    }

    void vline(double x, const std::string& color, const std::string& dash = "6,4") {
        body_ << "<line x1=\"" << fmt(px(x)) << "\" y1=\"" << fmt(py(y0_)) << "\" x2=\"" << fmt(px(x))
              << "\" y2=\"" << fmt(py(y1_)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"" << dash << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int font = 14) {
        body_ << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << font
              << "\" font-family=\"sans-serif\">" << s << "</text>\n";
    }

    void frame(const std::string& xlabel, const std::string& ylabel) {
        body_ << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size - 2 * margin
              << "\" height=\"" << size - 2 * margin << "\" fill=\"none\" stroke=\"#444\"/>\n";
        text(size / 2 - 20, size - 15, xlabel);
        text(10, size / 2, ylabel);
        text(margin - 5, size - margin + 20, fmt(x0_), 11);
        text(size - margin - 20, size - margin + 20, fmt(x1_), 11);
        text(5, size - margin, fmt(y0_), 11);
        text(5, margin + 5, fmt(y1_), 11);
    }

    void write(std::ostream& os, const std::string& header) const {
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        if (!header.empty()) {
            os << "<!--\n";
            std::istringstream in(header);
            std::string line;
            while (std::getline(in, line)) os << line << '\n';
            os << "-->\n";
        }
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
        os << "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
        os << body_.str();
        os << "</svg>\n";
    }

    static std::string fmt(double x) {
        std::ostringstream s;
        s << std::setprecision(6) << x;
        return s.str();
    }

private:
    double x0_, x1_, y0_, y1_;
    std::ostringstream body_;
};

}  // namespace kgeo::detail
