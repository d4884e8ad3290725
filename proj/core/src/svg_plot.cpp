#include "mbae/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mbae/errors.hpp"

namespace mbae {

namespace {

constexpr double kWidth = 880.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 690.0;   // plot area right edge; legend sits beyond
constexpr double kTop = 30.0;
constexpr double kBottom = 470.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fixed2(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  if (ec != std::errc{}) throw NumericError("svg coordinate formatting failed");
  return std::string(buf, ptr);
}

std::string tick_label(double v) {
  // Round tick values print compactly; fall back to shortest otherwise.
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw NumericError("svg tick formatting failed");
  return std::string(buf, ptr);
}

std::vector<double> make_ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step = 10.0 * mag;
  if (norm < 1.5) {
    step = mag;
  } else if (norm < 3.0) {
    step = 2.0 * mag;
  } else if (norm < 7.0) {
    step = 5.0 * mag;
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  for (; t <= hi + 1e-9 * step; t += step) {
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_learning_curves_svg(const std::vector<Curve>& curves) {
  if (curves.empty()) throw ConfigError("plot needs at least one curve");
  for (const Curve& c : curves) {
    if (c.rows.empty()) throw ConfigError("curve '" + c.label + "' has no rows");
  }

  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  bool first = true;
  for (const Curve& c : curves) {
    for (const AggregateRow& r : c.rows) {
      const double x = static_cast<double>(r.episode);
      const double lo = r.return_center - r.return_spread;
      const double hi = r.return_center + r.return_spread;
      if (first) {
        x_lo = x_hi = x;
        y_lo = lo;
        y_hi = hi;
        first = false;
      } else {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, lo);
        y_hi = std::max(y_hi, hi);
      }
    }
  }
  if (x_hi - x_lo < 1e-12) x_hi = x_lo + 1.0;
  if (y_hi - y_lo < 1e-12) {
    y_lo -= 1.0;
    y_hi += 1.0;
  }
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const auto sx = [&](double x) {
    return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft);
  };
  const auto sy = [&](double y) {
    return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(kWidth) +
         "\" height=\"" + fixed2(kHeight) + "\" viewBox=\"0 0 " + fixed2(kWidth) + " " +
         fixed2(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Bands first so lines draw on top.
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const auto& rows = curves[i].rows;
    std::string d = "M";
    for (const AggregateRow& r : rows) {
      d += " " + fixed2(sx(static_cast<double>(r.episode))) + "," +
           fixed2(sy(r.return_center + r.return_spread));
    }
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      d += " " + fixed2(sx(static_cast<double>(it->episode))) + "," +
           fixed2(sy(it->return_center - it->return_spread));
    }
    d += " Z";
    svg += "<path d=\"" + d + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
  }

  // Axes and ticks.
  svg += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kBottom) + "\" x2=\"" +
         fixed2(kRight) + "\" y2=\"" + fixed2(kBottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fixed2(kLeft) + "\" y1=\"" + fixed2(kTop) + "\" x2=\"" +
         fixed2(kLeft) + "\" y2=\"" + fixed2(kBottom) + "\" stroke=\"black\"/>\n";
  for (double t : make_ticks(x_lo, x_hi, 6)) {
    const double x = sx(t);
    svg += "<line x1=\"" + fixed2(x) + "\" y1=\"" + fixed2(kBottom) + "\" x2=\"" + fixed2(x) +
           "\" y2=\"" + fixed2(kBottom + 5.0) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(x) + "\" y=\"" + fixed2(kBottom + 20.0) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
  }
  for (double t : make_ticks(y_lo, y_hi, 5)) {
    const double y = sy(t);
    svg += "<line x1=\"" + fixed2(kLeft - 5.0) + "\" y1=\"" + fixed2(y) + "\" x2=\"" +
           fixed2(kLeft) + "\" y2=\"" + fixed2(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fixed2(kLeft - 9.0) + "\" y=\"" + fixed2(y + 4.0) +
           "\" font-size=\"12\" text-anchor=\"end\">" + tick_label(t) + "</text>\n";
  }
  svg += "<text x=\"" + fixed2((kLeft + kRight) / 2.0) + "\" y=\"" + fixed2(kBottom + 40.0) +
         "\" font-size=\"14\" text-anchor=\"middle\">episodes</text>\n";
  svg += "<text x=\"18.00\" y=\"" + fixed2((kTop + kBottom) / 2.0) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         fixed2((kTop + kBottom) / 2.0) + ")\">mean return</text>\n";

  // Mean lines.
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string points;
    for (const AggregateRow& r : curves[i].rows) {
      if (!points.empty()) points += " ";
      points += fixed2(sx(static_cast<double>(r.episode))) + "," + fixed2(sy(r.return_center));
    }
    svg += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
  }

  // Legend.
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    const double y = kTop + 18.0 * static_cast<double>(i);
    svg += "<line x1=\"" + fixed2(kRight + 14.0) + "\" y1=\"" + fixed2(y) + "\" x2=\"" +
           fixed2(kRight + 40.0) + "\" y2=\"" + fixed2(y) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed2(kRight + 46.0) + "\" y=\"" + fixed2(y + 4.0) +
           "\" font-size=\"12\">" + escape_xml(curves[i].label) + "</text>\n";
  }

  svg += "</svg>\n";
  return svg;
}

void plot_curves(const std::vector<std::filesystem::path>& aggregate_csvs,
                 const std::filesystem::path& out_svg) {
  if (aggregate_csvs.empty()) throw ConfigError("plot_curves needs at least one csv");
  std::vector<Curve> curves;
  for (const auto& path : aggregate_csvs) {
    Curve curve;
    curve.label = path.stem().string();
    curve.rows = aggregate_from_csv(read_text_file(path));
    curves.push_back(std::move(curve));
  }
  write_text_file(out_svg, render_learning_curves_svg(curves));
}

}  // namespace mbae
