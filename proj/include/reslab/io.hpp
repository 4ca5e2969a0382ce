#pragma once

#include <string>
#include <vector>

namespace reslab {

/// %.17g, so every double round-trips. NaN and infinities print as
/// nan / inf / -inf.
std::string format_double(double x);

/// Writes content to path through a temporary file in the same directory
/// and a rename. Creates missing parent directories. Throws ValidationError
/// ("io") on failure.
void write_atomic(const std::string& path, const std::string& content);

/// Comma-separated table with a header row. Cells are written verbatim; the
/// caller keeps commas out of them.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    CsvTable& row(std::vector<std::string> cells);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string cell(double x);
std::string cell(long long x);
inline std::string cell(int x) { return cell(static_cast<long long>(x)); }
inline std::string cell(std::size_t x) { return cell(static_cast<long long>(x)); }
inline std::string cell(const std::string& s) { return s; }

struct SvgPoint {
    double x = 0.0, y = 0.0;
    double size = 1.0;  ///< radius scale for scatter points
};

struct SvgSeries {
    std::string label;
    std::string color = "#1f77b4";
    bool line = false;       ///< polyline instead of circles
    bool steps = false;      ///< histogram-style step line (x are left edges)
    std::vector<SvgPoint> points;
};

struct SvgMarker {
    std::string label;
    double x = 0.0;          ///< vertical dashed line at x
};

struct SvgPlot {
    std::string title, xlabel, ylabel;
    bool log_x = false, log_y = false;
    std::vector<SvgSeries> series;
    std::vector<SvgMarker> markers;
};

/// Fixed 640 x 480 viewport, no timestamps: the same plot gives the same
/// bytes. An empty plot renders axes over [0, 1] x [0, 1].
std::string render_svg(const SvgPlot& plot);
void emit_svg(const SvgPlot& plot, const std::string& path);

}  // namespace reslab
