#ifndef FAIRCEPTRON_RENDER_H_
#define FAIRCEPTRON_RENDER_H_

#include <filesystem>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "fairceptron/analysis.h"

namespace fairceptron {

// One <rect class="cell"> per cell, highest y bin on top. Cells are colored
// on a sequential scale from the smallest to the largest mean; missing cells
// use a hatch pattern. Each cell carries its count as text.
std::string RenderHeatmapSvg(const HeatmapGrid& grid,
                             std::string_view title = {});

// Matrix CSV: header "y_bin,[x0,x1),..." then one row per y bin (lowest
// first) labelled "[y0,y1)"; the last bin of each axis is labelled "[a,b]".
// Missing cells are empty.
std::string HeatmapMeansCsv(const HeatmapGrid& grid);
std::string HeatmapCountsCsv(const HeatmapGrid& grid);

// Long format: one line per cell with every statistic.
std::string HeatmapSummaryCsv(const HeatmapGrid& grid);

// Parses a matrix CSV back into values; empty cells become NaN.
Eigen::MatrixXd ParseMatrixCsv(std::string_view text);

// Writes <stem>.svg, <stem>_means.csv, <stem>_counts.csv, <stem>_summary.csv.
void WriteHeatmap(const HeatmapGrid& grid, const std::filesystem::path& dir,
                  const std::string& stem, std::string_view title = {});

}  // namespace fairceptron

#endif  // FAIRCEPTRON_RENDER_H_
