#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace emshock {

// One panel of a small-multiples chart: a median line with two shaded
// bands, or any set of plain lines.
struct SvgSeries {
  std::string label;
  std::vector<double> values;
  std::string color = "#000000";
  bool dashed = false;
};

struct SvgBand {
  std::vector<double> lower;
  std::vector<double> upper;
  std::string color = "#9dc3e6";
  double opacity = 0.5;
};

struct SvgPanel {
  std::string title;
  std::vector<double> x;
  std::vector<SvgSeries> lines;
  std::vector<SvgBand> bands;
  std::vector<double> vertical_marks;  // dashed reference lines (kinks)
};

// Grid of panels written as a standalone SVG file; purely generative.
void write_svg_panels(const std::vector<SvgPanel>& panels, int columns,
                      const std::filesystem::path& path);

}  // namespace emshock
