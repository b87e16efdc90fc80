#pragma once

#include <string>
#include <vector>

namespace faassim {

struct PlotOptions {
    std::string metric = "p99_slowdown"; // a summary.csv column
    bool log_y = false;
    std::string title;
    int width = 720;
    int height = 480;
};

// Renders one line per policy (x = load, y = metric, seeds averaged) from a
// summary CSV into a self-contained SVG. Throws std::invalid_argument for an
// unknown metric, listing the available columns.
void plot_summary(const std::string& summary_csv_path, const PlotOptions& options,
                  const std::string& out_path);

} // namespace faassim
