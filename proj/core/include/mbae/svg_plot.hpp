#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mbae/csv.hpp"

namespace mbae {

struct Curve {
  std::string label;
  std::vector<AggregateRow> rows;
};

// Static learning-curve figure: x = episodes, y = mean return, one line plus
// a +-1 std band per curve, legend, axis ticks and labels. Deterministic
// output: same inputs give identical bytes. No external renderer.
std::string render_learning_curves_svg(const std::vector<Curve>& curves);

// Spec surface: read aggregate CSVs (curve labels from the file stems) and
// write the overlay SVG.
void plot_curves(const std::vector<std::filesystem::path>& aggregate_csvs,
                 const std::filesystem::path& out_svg);

}  // namespace mbae
