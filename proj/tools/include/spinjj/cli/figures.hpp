#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spinjj/cli/io.hpp"

namespace spinjj::cli {

struct FigureResult {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

/// Regenerates the data behind figure `number` (1..5) into `dir`.
/// With `plot`, an SVG is written next to each data file.
FigureResult run_figure(int number, const std::filesystem::path& dir, Format format, bool plot);

/// Observable of the fifth figure: |xi_+|^2 - |xi_0|^2.
double rho_pp_minus_rho_00(const SpinorPair& s);

}  // namespace spinjj::cli
