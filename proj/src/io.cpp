#include "reslab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "reslab/error.hpp"

namespace reslab {

namespace {
constexpr const char* kModule = "io";
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw ValidationError(kModule, "cannot create directory for " + path + ": " + ec.message());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError(kModule, "cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ValidationError(kModule, "write failed for " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw ValidationError(kModule, "cannot rename into " + path);
    }
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw ValidationError(kModule, "CSV header is empty");
}

CsvTable& CsvTable::row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) {
        throw ValidationError(kModule, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                           std::to_string(header_.size()));
    }
    rows_.push_back(std::move(cells));
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    const auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string cell(double x) { return format_double(x); }
std::string cell(long long x) { return std::to_string(x); }

// ---------------------------------------------------------------------------

namespace {

constexpr double kWidth = 640, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

std::string tick(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double t(double v) const {
        const double a = log ? std::log10(lo) : lo, b = log ? std::log10(hi) : hi;
        const double x = log ? std::log10(v) : v;
        return (x - a) / (b - a);
    }
};

Axis make_axis(std::vector<double> vals, bool log) {
    Axis ax;
    ax.log = log;
    vals.erase(std::remove_if(vals.begin(), vals.end(),
                              [&](double v) { return !std::isfinite(v) || (log && v <= 0.0); }),
               vals.end());
    if (vals.empty()) {
        ax.lo = log ? 1.0 : 0.0;
        ax.hi = log ? 10.0 : 1.0;
        return ax;
    }
    const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
    ax.lo = *mn;
    ax.hi = *mx;
    if (log) {
        if (ax.hi <= ax.lo) {
            ax.lo /= 2;
            ax.hi *= 2;
        }
        return ax;
    }
    const double span = ax.hi - ax.lo;
    const double pad = span > 0 ? 0.05 * span : std::max(0.5, 0.05 * std::abs(ax.lo));
    ax.lo -= pad;
    ax.hi += pad;
    return ax;
}

}  // namespace

std::string render_svg(const SvgPlot& plot) {
    std::vector<double> xs, ys;
    for (const auto& s : plot.series) {
        for (const auto& p : s.points) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
    }
    for (const auto& m : plot.markers) xs.push_back(m.x);
    const Axis ax = make_axis(xs, plot.log_x), ay = make_axis(ys, plot.log_y);
    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + pw * ax.t(x); };
    const auto py = [&](double y) { return kTop + ph * (1.0 - ay.t(y)); };
    const auto visible = [&](const SvgPoint& p) {
        return std::isfinite(p.x) && std::isfinite(p.y) && (!plot.log_x || p.x > 0) && (!plot.log_y || p.y > 0);
    };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    o << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    o << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << escape(plot.title) << "</text>\n";
    o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\""
      << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = i / 4.0;
        const double xv = ax.log ? std::pow(10.0, std::log10(ax.lo) + f * (std::log10(ax.hi) - std::log10(ax.lo)))
                                 : ax.lo + f * (ax.hi - ax.lo);
        const double yv = ay.log ? std::pow(10.0, std::log10(ay.lo) + f * (std::log10(ay.hi) - std::log10(ay.lo)))
                                 : ay.lo + f * (ay.hi - ay.lo);
        o << "<text x=\"" << fmt(kLeft + f * pw) << "\" y=\"" << fmt(kTop + ph + 18)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv) << "</text>\n";
        o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(kTop + ph * (1 - f) + 4)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv) << "</text>\n";
    }
    o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 10)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(plot.xlabel)
      << "</text>\n";
    o << "<text x=\"16\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\""
      << " font-size=\"13\" transform=\"rotate(-90 16 " << fmt(kTop + ph / 2) << ")\">" << escape(plot.ylabel)
      << "</text>\n";

    for (const auto& m : plot.markers) {
        if (plot.log_x && m.x <= 0) continue;
        o << "<line x1=\"" << fmt(px(m.x)) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(px(m.x)) << "\" y2=\""
          << fmt(kTop + ph) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
        o << "<text x=\"" << fmt(px(m.x) + 3) << "\" y=\"" << fmt(kTop + 12)
          << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">" << escape(m.label) << "</text>\n";
    }
    int legend = 0;
    for (const auto& s : plot.series) {
        if (s.line || s.steps) {
            std::string pts;
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                const auto& p = s.points[i];
                if (!visible(p)) continue;
                pts += fmt(px(p.x)) + "," + fmt(py(p.y)) + " ";
                if (s.steps && i + 1 < s.points.size()) pts += fmt(px(s.points[i + 1].x)) + "," + fmt(py(p.y)) + " ";
            }
            if (!pts.empty()) pts.pop_back();
            o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << pts
              << "\"/>\n";
        } else {
            for (const auto& p : s.points) {
                if (!visible(p)) continue;
                o << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y)) << "\" r=\""
                  << fmt(3.0 * std::max(0.5, p.size)) << "\" fill=\"" << s.color << "\" fill-opacity=\"0.7\"/>\n";
            }
        }
        if (!s.label.empty()) {
            const double ly = kTop + 16 + 16 * legend++;
            o << "<rect x=\"" << fmt(kWidth - kRight - 150) << "\" y=\"" << fmt(ly - 9)
              << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
            o << "<text x=\"" << fmt(kWidth - kRight - 135) << "\" y=\"" << fmt(ly)
              << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
        }
    }
    o << "</svg>\n";
    return o.str();
}

void emit_svg(const SvgPlot& plot, const std::string& path) { write_atomic(path, render_svg(plot)); }

}  // namespace reslab
