#include "sheaflearn/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "sheaflearn/io.hpp"

namespace sheaflearn::plot {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, x);
  return buf;
}

std::string px(double x) { return fmt("%.2f", x); }

}  // namespace

std::vector<Panel> group_panels(const RunReport& report) {
  std::map<std::pair<double, double>, Panel> panels;
  for (const auto& row : report.rows) {
    Panel& p = panels[{row.alpha, row.snr_db}];
    p.alpha = row.alpha;
    p.snr_db = row.snr_db;
    (row.mode == DistanceMode::aligned ? p.aligned : p.baseline).emplace_back(row.e0, row.total_variation);
  }
  std::vector<Panel> out;
  for (auto& [key, p] : panels) {
    std::sort(p.aligned.begin(), p.aligned.end());
    std::sort(p.baseline.begin(), p.baseline.end());
    bool first = true;
    for (const auto* series : {&p.aligned, &p.baseline}) {
      for (const auto& [e0, tv] : *series) {
        if (first) {
          p.axes = {double(e0), double(e0), tv, tv};
          first = false;
        }
        p.axes.x_min = std::min(p.axes.x_min, double(e0));
        p.axes.x_max = std::max(p.axes.x_max, double(e0));
        p.axes.y_min = std::min(p.axes.y_min, tv);
        p.axes.y_max = std::max(p.axes.y_max, tv);
      }
    }
    if (p.axes.x_max == p.axes.x_min) {
      p.axes.x_min -= 1.0;
      p.axes.x_max += 1.0;
    }
    const double pad = p.axes.y_max > p.axes.y_min ? 0.05 * (p.axes.y_max - p.axes.y_min) : 1.0;
    p.axes.y_min -= pad;
    p.axes.y_max += pad;
    out.push_back(std::move(p));
  }
  return out;
}

std::string render_panel_svg(const Panel& panel) {
  const AxisRange& a = panel.axes;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - a.x_min) / (a.x_max - a.x_min) * plot_w; };
  auto sy = [&](double y) { return kTop + (a.y_max - y) / (a.y_max - a.y_min) * plot_h; };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) +
         "\" viewBox=\"0 0 " + px(kWidth) + " " + px(kHeight) + "\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"" + px(kWidth) + "\" height=\"" + px(kHeight) + "\" fill=\"white\"/>\n";
  out += "<text x=\"" + px(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
         "alpha = " + io::format_double(panel.alpha) + ", SNR = " + io::format_double(panel.snr_db) + " dB</text>\n";
  out += "<rect x=\"" + px(kLeft) + "\" y=\"" + px(kTop) + "\" width=\"" + px(plot_w) + "\" height=\"" + px(plot_h) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double xv = a.x_min + (a.x_max - a.x_min) * i / kTicks;
    const double yv = a.y_min + (a.y_max - a.y_min) * i / kTicks;
    out += "<line x1=\"" + px(sx(xv)) + "\" y1=\"" + px(kTop + plot_h) + "\" x2=\"" + px(sx(xv)) + "\" y2=\"" +
           px(kTop + plot_h + 5) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(sx(xv)) + "\" y=\"" + px(kTop + plot_h + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt("%.4g", xv) + "</text>\n";
    out += "<line x1=\"" + px(kLeft - 5) + "\" y1=\"" + px(sy(yv)) + "\" x2=\"" + px(kLeft) + "\" y2=\"" +
           px(sy(yv)) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + px(kLeft - 8) + "\" y=\"" + px(sy(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt("%.4g", yv) + "</text>\n";
  }
  out += "<text x=\"" + px(kLeft + plot_w / 2) + "\" y=\"" + px(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">number of edges E0</text>\n";
  out += "<text x=\"16\" y=\"" + px(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\" transform=\"rotate(-90 16 " + px(kTop + plot_h / 2) + ")\">total variation</text>\n";

  auto polyline = [&](const std::vector<std::pair<int, double>>& series, const char* colour, const char* dash) {
    if (series.empty()) return;
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"2\"";
    if (*dash) out += " stroke-dasharray=\"" + std::string(dash) + "\"";
    out += " points=\"";
    for (std::size_t i = 0; i < series.size(); ++i) {
      if (i) out += ' ';
      out += px(sx(series[i].first)) + ',' + px(sy(series[i].second));
    }
    out += "\"/>\n";
  };
  polyline(panel.aligned, "#1f77b4", "");
  polyline(panel.baseline, "#d62728", "6,4");

  const double lx = kLeft + 12;
  const double ly = kTop + 14;
  out += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly) + "\" x2=\"" + px(lx + 30) + "\" y2=\"" + px(ly) +
         "\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  out += "<text x=\"" + px(lx + 36) + "\" y=\"" + px(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"11\">aligned (sheaf)</text>\n";
  out += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly + 16) + "\" x2=\"" + px(lx + 30) + "\" y2=\"" + px(ly + 16) +
         "\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
  out += "<text x=\"" + px(lx + 36) + "\" y=\"" + px(ly + 20) +
         "\" font-family=\"sans-serif\" font-size=\"11\">baseline (graph)</text>\n";
  out += "</svg>\n";
  return out;
}

std::string panel_filename(const Panel& panel) {
  return "tv_alpha_" + io::format_double(panel.alpha) + "_snr_" + io::format_double(panel.snr_db) + ".svg";
}

std::vector<std::filesystem::path> emit_plots(const RunReport& report, const std::filesystem::path& out_dir) {
  if (report.rows.empty()) throw std::invalid_argument("emit_plots: empty report");
  std::vector<std::filesystem::path> paths;
  for (const auto& panel : group_panels(report)) {
    paths.push_back(out_dir / panel_filename(panel));
    io::write_text(paths.back(), render_panel_svg(panel));
  }
  return paths;
}

}  // namespace sheaflearn::plot
