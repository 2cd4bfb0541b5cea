#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spinjj::cli {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Line chart as a standalone SVG document. Series longer than 4000 points
/// are thinned by striding.
std::string render_svg(const PlotSpec& spec);

/// Writes render_svg(spec) to `path`; returns false instead of throwing
/// when the file cannot be written.
bool write_svg(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace spinjj::cli
