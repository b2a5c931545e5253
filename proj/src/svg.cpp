#include "noisereg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "noisereg/errors.hpp"

namespace noisereg {

namespace {

std::string fmt(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.2f", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  double width = 760, height = 520;
  double left = 70, right = 24, top = 44, bottom = 56;
  double x_min = 0, x_max = 1;   // data units
  double ly_min = 0, ly_max = 1; // log10 units

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double px(double x) const {
    return left + (x - x_min) / (x_max - x_min) * plot_w();
  }
  double py_log(double y) const {
    double ly = std::log10(std::max(y, 1e-300));
    ly = std::clamp(ly, ly_min, ly_max);
    return top + (ly_max - ly) / (ly_max - ly_min) * plot_h();
  }
};

void line(std::ostream& out, double x1, double y1, double x2, double y2,
          const std::string& stroke, double width, const std::string& dash = "") {
  out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
      << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
      << fmt(width) << "\"";
  if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
  out << "/>\n";
}

void text(std::ostream& out, double x, double y, const std::string& s,
          const std::string& anchor = "middle", int size = 12,
          const std::string& extra = "") {
  out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
      << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\"" << extra
      << ">" << xml_escape(s) << "</text>\n";
}

// Polyline through (x, y) samples on the log frame; breaks at NaN.
void polyline_log(std::ostream& out, const Frame& f,
                  const std::vector<std::pair<double, double>>& pts,
                  const std::string& stroke, double width, double opacity = 1.0,
                  const std::string& dash = "") {
  std::ostringstream seg;
  int count = 0;
  auto flush = [&]() {
    if (count >= 2) {
      out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\""
          << fmt(width) << "\"";
      if (opacity < 1.0) out << " stroke-opacity=\"" << fmt(opacity) << "\"";
      if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
      out << " points=\"" << seg.str() << "\"/>\n";
    }
    seg.str("");
    count = 0;
  };
  for (const auto& [x, y] : pts) {
    if (std::isnan(y)) {
      flush();
      continue;
    }
    seg << fmt(f.px(x)) << ',' << fmt(f.py_log(y)) << ' ';
    ++count;
  }
  flush();
}

std::string nice_number(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

} // namespace

void render_curve_svg(const ErrorCurve& curve, const CurveSvgOptions& options,
                      const std::string& path) {
  if (curve.points.empty()) throw data_error("render_curve_svg: empty curve");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open for writing: " + path);

  Frame f;
  f.x_min = static_cast<double>(curve.points.front().index);
  f.x_max = static_cast<double>(curve.points.back().index);
  if (f.x_max == f.x_min) f.x_max = f.x_min + 1;

  // y range from the finite positive plotted values.
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = 0.0;
  auto fold = [&](double v) {
    if (std::isfinite(v) && v > 0) {
      y_lo = std::min(y_lo, v);
      y_hi = std::max(y_hi, v);
    }
  };
  for (const auto& p : curve.points) {
    fold(p.test_rmse_mean);
    fold(p.analytic_rmse);
    fold(p.train_rmse);
  }
  if (options.null_rmse > 0) fold(options.null_rmse);
  if (!(y_hi > 0)) {
    y_lo = 0.1;
    y_hi = 1.0;
  }
  f.ly_min = std::floor(std::log10(y_lo) * 2.0) / 2.0 - 0.1;
  f.ly_max = std::ceil(std::log10(y_hi) * 2.0) / 2.0 + 0.1;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(f.width)
      << "\" height=\"" << fmt(f.height) << "\" viewBox=\"0 0 " << fmt(f.width) << ' '
      << fmt(f.height) << "\">\n";
  out << "<rect width=\"" << fmt(f.width) << "\" height=\"" << fmt(f.height)
      << "\" fill=\"white\"/>\n";

  // Axes box.
  line(out, f.left, f.top, f.left, f.height - f.bottom, "#333", 1);
  line(out, f.left, f.height - f.bottom, f.width - f.right, f.height - f.bottom,
       "#333", 1);

  // x ticks: about six round values.
  const double span = f.x_max - f.x_min;
  double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
  if (span / step > 10) step *= 5;
  else if (span / step > 5) step *= 2;
  for (double x = std::ceil(f.x_min / step) * step; x <= f.x_max + 1e-9; x += step) {
    line(out, f.px(x), f.height - f.bottom, f.px(x), f.height - f.bottom + 4, "#333", 1);
    text(out, f.px(x), f.height - f.bottom + 18, nice_number(x));
  }
  // y ticks at powers of ten.
  for (int k = static_cast<int>(std::ceil(f.ly_min)); k <= std::floor(f.ly_max); ++k) {
    const double y = std::pow(10.0, k);
    line(out, f.left - 4, f.py_log(y), f.left, f.py_log(y), "#333", 1);
    text(out, f.left - 8, f.py_log(y) + 4, "1e" + std::to_string(k), "end", 11);
    line(out, f.left, f.py_log(y), f.width - f.right, f.py_log(y), "#eee", 1);
  }

  // Reference marks.
  if (options.n0_mark >= 0) {
    const double x = f.px(static_cast<double>(options.n0_mark));
    line(out, x, f.top, x, f.height - f.bottom, "#999", 1.2);
  }
  if (options.d0_mark >= 0) {
    const double x = f.px(static_cast<double>(options.d0_mark));
    line(out, x, f.top, x, f.height - f.bottom, "#000", 1.2);
  }
  if (options.null_rmse > 0)
    line(out, f.left, f.py_log(options.null_rmse), f.width - f.right,
         f.py_log(options.null_rmse), "#000", 1, "2,3");

  // Light per-trial conditional RMSE curves.
  const int n_light = std::min<long>(options.light_curves, curve.trials);
  for (int t = 0; t < n_light; ++t) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points.size());
    for (std::size_t g = 0; g < curve.points.size(); ++g)
      pts.emplace_back(static_cast<double>(curve.points[g].index),
                       std::sqrt(curve.trial_risks[g][t]));
    polyline_log(out, f, pts, "#f2b2ac", 0.7, 0.8);
  }

  // Training RMSE (zeros clamp to the axis floor).
  std::vector<std::pair<double, double>> train_pts, test_pts, analytic_pts;
  for (const auto& p : curve.points) {
    const double x = static_cast<double>(p.index);
    train_pts.emplace_back(x, std::max(p.train_rmse, 1e-300));
    test_pts.emplace_back(x, p.test_rmse_mean);
    analytic_pts.emplace_back(
        x, std::isfinite(p.analytic_rmse) ? p.analytic_rmse
                                          : std::numeric_limits<double>::quiet_NaN());
  }
  polyline_log(out, f, train_pts, "#4682b4", 1.6);
  polyline_log(out, f, test_pts, "#b22222", 2.0);
  polyline_log(out, f, analytic_pts, "#000", 1.2, 1.0, "5,3");

  // Infinite analytic values: marker at the top edge.
  for (const auto& p : curve.points)
    if (std::isinf(p.analytic_rmse)) {
      const double x = f.px(static_cast<double>(p.index));
      out << "<path d=\"M " << fmt(x - 4) << ' ' << fmt(f.top + 8) << " L " << fmt(x + 4)
          << ' ' << fmt(f.top + 8) << " L " << fmt(x) << ' ' << fmt(f.top)
          << " Z\" fill=\"#b22222\"/>\n";
    }

  text(out, f.left + f.plot_w() / 2, f.height - 14, options.x_label);
  text(out, 18, f.top + f.plot_h() / 2, "RMSE", "middle", 12,
       " transform=\"rotate(-90 18 " + fmt(f.top + f.plot_h() / 2) + ")\"");
  if (!options.title.empty()) text(out, f.width / 2, 22, options.title, "middle", 14);

  out << "</svg>\n";
  if (!out) throw data_error("write failed: " + path);
}

void render_heatmap_svg(const HeatmapResult& hm, const std::string& path) {
  if (hm.mean_lambda_raw.size() == 0)
    throw data_error("render_heatmap_svg: empty heatmap");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open for writing: " + path);

  const Eigen::Index rows = hm.mean_lambda_raw.rows();
  const Eigen::Index cols = hm.mean_lambda_raw.cols();
  const double cell_w = 72, cell_h = 48;
  const double left = 80, top = 48, bottom = 56, right = 96;
  const double width = left + cell_w * static_cast<double>(cols) + right;
  const double height = top + cell_h * static_cast<double>(rows) + bottom;

  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      max_abs = std::max(max_abs, std::abs(hm.mean_lambda_raw(i, j)));
  if (max_abs == 0.0) max_abs = 1.0;

  // Diverging palette centered at zero: purple-blue above, orange-red below.
  auto color = [&](double v) {
    const double t = std::clamp(std::abs(v) / max_abs, 0.0, 1.0);
    int r, g, b;
    if (v >= 0) {
      r = static_cast<int>(255 + t * (80 - 255));
      g = static_cast<int>(255 + t * (60 - 255));
      b = static_cast<int>(255 + t * (170 - 255));
    } else {
      r = static_cast<int>(255 + t * (225 - 255));
      g = static_cast<int>(255 + t * (90 - 255));
      b = static_cast<int>(255 + t * (25 - 255));
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return std::string(buf);
  };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' '
      << fmt(height) << "\">\n";
  out << "<rect width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"white\"/>\n";
  text(out, width / 2, 24, "mean optimal ridge parameter", "middle", 14);

  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double x = left + cell_w * static_cast<double>(j);
      const double y = top + cell_h * static_cast<double>(i);
      out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
          << fmt(cell_w) << "\" height=\"" << fmt(cell_h) << "\" fill=\""
          << color(hm.mean_lambda_raw(i, j)) << "\" stroke=\"#ccc\"/>\n";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.3g", hm.mean_lambda_raw(i, j));
      text(out, x + cell_w / 2, y + cell_h / 2 + 4, buf, "middle", 10);
    }
    text(out, left - 8, top + cell_h * (static_cast<double>(i) + 0.5) + 4,
         std::to_string(hm.n0_grid[i]), "end", 11);
  }
  for (Eigen::Index j = 0; j < cols; ++j)
    text(out, left + cell_w * (static_cast<double>(j) + 0.5),
         top + cell_h * static_cast<double>(rows) + 18, std::to_string(hm.noise_grid[j]));

  text(out, left + cell_w * static_cast<double>(cols) / 2, height - 16, "n - n0");
  text(out, 20, top + cell_h * static_cast<double>(rows) / 2, "n0", "middle", 12,
       " transform=\"rotate(-90 20 " + fmt(top + cell_h * static_cast<double>(rows) / 2) +
           ")\"");

  // Color scale.
  const double bar_x = left + cell_w * static_cast<double>(cols) + 24;
  const double bar_h = cell_h * static_cast<double>(rows);
  const int slabs = 24;
  for (int s = 0; s < slabs; ++s) {
    const double v = max_abs - 2.0 * max_abs * (s + 0.5) / slabs;
    out << "<rect x=\"" << fmt(bar_x) << "\" y=\"" << fmt(top + bar_h * s / slabs)
        << "\" width=\"14\" height=\"" << fmt(bar_h / slabs + 0.5) << "\" fill=\""
        << color(v) << "\"/>\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", max_abs);
  text(out, bar_x + 20, top + 8, buf, "start", 10);
  text(out, bar_x + 20, top + bar_h / 2 + 4, "0", "start", 10);
  std::snprintf(buf, sizeof(buf), "%.3g", -max_abs);
  text(out, bar_x + 20, top + bar_h, buf, "start", 10);

  out << "</svg>\n";
  if (!out) throw data_error("write failed: " + path);
}

} // namespace noisereg
