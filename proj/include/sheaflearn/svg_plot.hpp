#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sheaflearn/experiment.hpp"

namespace sheaflearn::plot {

struct AxisRange {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// One (alpha, snr) panel: total variation against E0, one series per mode.
struct Panel {
  double alpha = 0.0;
  double snr_db = 0.0;
  std::vector<std::pair<int, double>> aligned;   // (E0, TV), E0 ascending
  std::vector<std::pair<int, double>> baseline;
  AxisRange axes;
};

/// Panels ordered by (alpha, snr_db); axes cover every plotted point.
std::vector<Panel> group_panels(const RunReport& report);

/// Aligned series solid, baseline dashed.
std::string render_panel_svg(const Panel& panel);

std::string panel_filename(const Panel& panel);

/// Writes one SVG per panel into out_dir and returns the paths.
/// Throws std::invalid_argument on an empty report.
std::vector<std::filesystem::path> emit_plots(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace sheaflearn::plot
