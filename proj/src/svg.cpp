#include "emshock/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "emshock/errors.hpp"

namespace emshock {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

void write_svg_panels(const std::vector<SvgPanel>& panels, int columns,
                      const std::filesystem::path& path) {
  if (panels.empty() || columns < 1)
    throw Error(ErrorKind::ConfigInvalid, "nothing to plot");
  const int rows = (static_cast<int>(panels.size()) + columns - 1) / columns;
  const double pw = 300, ph = 220, margin = 42, gap = 18;
  const double width = columns * (pw + gap) + gap;
  const double height = rows * (ph + gap) + gap;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) +
         "\" height=\"" + num(height) + "\" font-family=\"sans-serif\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t idx = 0; idx < panels.size(); ++idx) {
    const auto& panel = panels[idx];
    const double ox = gap + (idx % columns) * (pw + gap);
    const double oy = gap + (idx / columns) * (ph + gap);

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const auto absorb = [&](const std::vector<double>& vs) {
      for (double v : vs)
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
    };
    for (const auto& line : panel.lines) absorb(line.values);
    for (const auto& band : panel.bands) {
      absorb(band.lower);
      absorb(band.upper);
    }
    if (!std::isfinite(lo)) {
      lo = -1;
      hi = 1;
    }
    if (hi - lo < 1e-12) {
      hi += 0.5;
      lo -= 0.5;
    }
    const double pad = 0.06 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double x0 = panel.x.empty() ? 0 : panel.x.front();
    const double x1 = panel.x.empty() ? 1 : panel.x.back();

    const auto px = [&](double v) {
      return ox + margin + (v - x0) / std::max(x1 - x0, 1e-12) * (pw - margin - 8);
    };
    const auto py = [&](double v) {
      return oy + ph - 26 - (v - lo) / (hi - lo) * (ph - 26 - 22);
    };

    out += "<text x=\"" + num(ox + pw / 2) + "\" y=\"" + num(oy + 14) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + panel.title +
           "</text>\n";
    out += "<rect x=\"" + num(ox + margin) + "\" y=\"" + num(oy + 22) +
           "\" width=\"" + num(pw - margin - 8) + "\" height=\"" +
           num(ph - 26 - 22) +
           "\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.6\"/>\n";
    if (lo < 0.0 && hi > 0.0)
      out += "<line x1=\"" + num(px(x0)) + "\" y1=\"" + num(py(0)) + "\" x2=\"" +
             num(px(x1)) + "\" y2=\"" + num(py(0)) +
             "\" stroke=\"#bbb\" stroke-width=\"0.6\"/>\n";

    for (const auto& band : panel.bands) {
      std::string pts;
      for (std::size_t i = 0; i < panel.x.size(); ++i)
        pts += num(px(panel.x[i])) + "," + num(py(band.upper[i])) + " ";
      for (std::size_t i = panel.x.size(); i-- > 0;)
        pts += num(px(panel.x[i])) + "," + num(py(band.lower[i])) + " ";
      out += "<polygon points=\"" + pts + "\" fill=\"" + band.color +
             "\" fill-opacity=\"" + num(band.opacity) + "\" stroke=\"none\"/>\n";
    }
    for (const auto& line : panel.lines) {
      std::string pts;
      for (std::size_t i = 0; i < panel.x.size(); ++i) {
        if (!std::isfinite(line.values[i])) continue;
        pts += num(px(panel.x[i])) + "," + num(py(line.values[i])) + " ";
      }
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             line.color + "\" stroke-width=\"1.4\"" +
             (line.dashed ? " stroke-dasharray=\"5,4\"" : "") + "/>\n";
    }
    for (double mark : panel.vertical_marks)
      out += "<line x1=\"" + num(px(mark)) + "\" y1=\"" + num(py(lo)) +
             "\" x2=\"" + num(px(mark)) + "\" y2=\"" + num(py(hi)) +
             "\" stroke=\"#777\" stroke-width=\"1\" "
             "stroke-dasharray=\"4,4\"/>\n";
    out += "<text x=\"" + num(ox + margin - 4) + "\" y=\"" + num(py(lo) + 4) +
           "\" text-anchor=\"end\" font-size=\"9\">" + num(lo) + "</text>\n";
    out += "<text x=\"" + num(ox + margin - 4) + "\" y=\"" + num(py(hi) + 4) +
           "\" text-anchor=\"end\" font-size=\"9\">" + num(hi) + "</text>\n";
  }
  out += "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::IoFailure, "cannot write " + path.string());
  file << out;
}

}  // namespace emshock
