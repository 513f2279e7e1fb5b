#include "fairceptron/render.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "fairceptron/csv.h"
#include "fairceptron/errors.h"
#include "fairceptron/util.h"

namespace fairceptron {
namespace {

constexpr int kCellWidth = 56;
constexpr int kCellHeight = 40;
constexpr int kLeftMargin = 90;
constexpr int kTopMargin = 40;
constexpr int kBottomMargin = 70;
constexpr int kRightMargin = 20;

std::string BinLabel(const BinSpec& spec, int bin) {
  const bool last = bin == spec.BinCount() - 1;
  return "[" + FormatDouble(spec.edges[bin]) + "," +
         FormatDouble(spec.edges[bin + 1]) + (last ? "]" : ")");
}

std::string XmlEscape(std::string_view text) {
  std::string out;
  for (const char c : text) {
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
        out += c;
    }
  }
  return out;
}

// Light yellow to dark blue.
std::string SequentialColor(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double from[3] = {255, 247, 188};
  const double to[3] = {8, 48, 107};
  char buffer[8];
  std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x",
                static_cast<int>(std::lround(from[0] + (to[0] - from[0]) * t)),
                static_cast<int>(std::lround(from[1] + (to[1] - from[1]) * t)),
                static_cast<int>(std::lround(from[2] + (to[2] - from[2]) * t)));
  return buffer;
}

std::string MatrixCsv(const HeatmapGrid& grid, bool counts) {
  csv::Row header = {"y_bin"};
  for (int c = 0; c < grid.x.BinCount(); ++c) {
    header.push_back(BinLabel(grid.x, c));
  }
  std::string out = csv::FormatRow(header);
  for (int r = 0; r < grid.y.BinCount(); ++r) {
    csv::Row row = {BinLabel(grid.y, r)};
    for (int c = 0; c < grid.x.BinCount(); ++c) {
      if (counts) {
        row.push_back(std::to_string(grid.count(r, c)));
      } else {
        row.push_back(grid.Missing(r, c) ? "" : FormatDouble(grid.mean(r, c)));
      }
    }
    out += csv::FormatRow(row);
  }
  return out;
}

}  // namespace

std::string RenderHeatmapSvg(const HeatmapGrid& grid, std::string_view title) {
  const int nx = grid.x.BinCount(), ny = grid.y.BinCount();
  const int width = kLeftMargin + nx * kCellWidth + kRightMargin;
  const int height = kTopMargin + ny * kCellHeight + kBottomMargin;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int r = 0; r < ny; ++r) {
    for (int c = 0; c < nx; ++c) {
      if (grid.Missing(r, c)) continue;
      lo = std::min(lo, grid.mean(r, c));
      hi = std::max(hi, grid.mean(r, c));
    }
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg +=
      "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
      "patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">"
      "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#999\" "
      "stroke-width=\"2\"/></pattern></defs>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + std::to_string(width / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
           XmlEscape(title) + "</text>\n";
  }

  for (int r = 0; r < ny; ++r) {
    const int top = kTopMargin + (ny - 1 - r) * kCellHeight;
    for (int c = 0; c < nx; ++c) {
      const int left = kLeftMargin + c * kCellWidth;
      const bool missing = grid.Missing(r, c);
      std::string fill = "url(#hatch)";
      if (!missing) {
        fill = SequentialColor(hi > lo ? (grid.mean(r, c) - lo) / (hi - lo)
                                       : 0.5);
      }
      svg += "<rect class=\"cell\" x=\"" + std::to_string(left) + "\" y=\"" +
             std::to_string(top) + "\" width=\"" + std::to_string(kCellWidth) +
             "\" height=\"" + std::to_string(kCellHeight) + "\" fill=\"" +
             fill + "\" stroke=\"#fff\"";
      svg += missing ? " data-missing=\"true\"" : "";
      svg += "><title>" + BinLabel(grid.x, c) + " x " + BinLabel(grid.y, r) +
             ": " +
             (missing ? std::string("no ratings")
                      : "mean " + FormatDouble(grid.mean(r, c))) +
             "</title></rect>\n";
      if (!missing) {
        const double t = hi > lo ? (grid.mean(r, c) - lo) / (hi - lo) : 0.5;
        svg += "<text class=\"count\" x=\"" +
               std::to_string(left + kCellWidth / 2) + "\" y=\"" +
               std::to_string(top + kCellHeight / 2 + 4) +
               "\" text-anchor=\"middle\" fill=\"" +
               (t > 0.5 ? "#fff" : "#000") + "\">" +
               std::to_string(grid.count(r, c)) + "</text>\n";
      }
    }
  }

  // Axis ticks at bin edges.
  const int axis_y = kTopMargin + ny * kCellHeight;
  for (int c = 0; c <= nx; ++c) {
    svg += "<text x=\"" + std::to_string(kLeftMargin + c * kCellWidth) +
           "\" y=\"" + std::to_string(axis_y + 14) +
           "\" text-anchor=\"middle\">" + FormatDouble(grid.x.edges[c]) +
           "</text>\n";
  }
  for (int r = 0; r <= ny; ++r) {
    svg += "<text x=\"" + std::to_string(kLeftMargin - 6) + "\" y=\"" +
           std::to_string(kTopMargin + (ny - r) * kCellHeight + 4) +
           "\" text-anchor=\"end\">" + FormatDouble(grid.y.edges[r]) +
           "</text>\n";
  }
  svg += "<text class=\"axis-label\" x=\"" +
         std::to_string(kLeftMargin + nx * kCellWidth / 2) + "\" y=\"" +
         std::to_string(axis_y + 40) + "\" text-anchor=\"middle\">" +
         MeasureName(grid.x.measure) + "</text>\n";
  svg += "<text class=\"axis-label\" x=\"16\" y=\"" +
         std::to_string(kTopMargin + ny * kCellHeight / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         std::to_string(kTopMargin + ny * kCellHeight / 2) + ")\">" +
         MeasureName(grid.y.measure) + "</text>\n";
  if (std::isfinite(lo)) {
    svg += "<text class=\"legend\" x=\"" + std::to_string(kLeftMargin) +
           "\" y=\"" + std::to_string(height - 8) + "\">mean rating " +
           FormatDouble(lo) + " (light) to " + FormatDouble(hi) +
           " (dark)</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string HeatmapMeansCsv(const HeatmapGrid& grid) {
  return MatrixCsv(grid, false);
}

std::string HeatmapCountsCsv(const HeatmapGrid& grid) {
  return MatrixCsv(grid, true);
}

std::string HeatmapSummaryCsv(const HeatmapGrid& grid) {
  std::string out = csv::FormatRow(
      {"x_bin", "y_bin", "count", "mean_rating", "std_rating",
       "median_answer_time_ms", "median_uncertainty"});
  auto cell = [](double v) { return std::isnan(v) ? "" : FormatDouble(v); };
  for (int r = 0; r < grid.y.BinCount(); ++r) {
    for (int c = 0; c < grid.x.BinCount(); ++c) {
      out += csv::FormatRow({BinLabel(grid.x, c), BinLabel(grid.y, r),
                             std::to_string(grid.count(r, c)),
                             cell(grid.mean(r, c)), cell(grid.stddev(r, c)),
                             cell(grid.median_answer_time_ms(r, c)),
                             cell(grid.median_uncertainty(r, c))});
    }
  }
  out += "# out_of_range," + std::to_string(grid.out_of_range) + "\n";
  return out;
}

Eigen::MatrixXd ParseMatrixCsv(std::string_view text) {
  const auto rows = csv::Parse(text);
  if (rows.empty()) throw ValidationError("matrix csv: no header");
  const auto cols = static_cast<Eigen::Index>(rows[0].size()) - 1;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()) - 1, cols);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<Eigen::Index>(rows[r].size()) != cols + 1) {
      throw ValidationError("matrix csv: ragged row " + std::to_string(r));
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& cell = rows[r][c + 1];
      if (cell.empty()) {
        m(r - 1, c) = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const auto v = ParseDouble(cell);
      if (!v) throw ValidationError("matrix csv: bad number '" + cell + "'");
      m(r - 1, c) = *v;
    }
  }
  return m;
}

void WriteHeatmap(const HeatmapGrid& grid, const std::filesystem::path& dir,
                  const std::string& stem, std::string_view title) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw LoadError("cannot write " + (dir / name).string());
    out << content;
  };
  write(stem + ".svg", RenderHeatmapSvg(grid, title));
  write(stem + "_means.csv", HeatmapMeansCsv(grid));
  write(stem + "_counts.csv", HeatmapCountsCsv(grid));
  write(stem + "_summary.csv", HeatmapSummaryCsv(grid));
}

}  // namespace fairceptron
