#include "texturekit/svg_report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "texturekit/csv.hpp"
#include "texturekit/errors.hpp"
#include "texturekit/strings.hpp"

namespace tk {

namespace {

std::string color_hex(int r, int g, int b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

// 0 -> deep blue, 1 -> yellow
std::string heat_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 * t));
  const int g = static_cast<int>(std::lround(40.0 + 190.0 * t));
  const int b = static_cast<int>(std::lround(160.0 * (1.0 - t) + 40.0));
  return color_hex(r, g, b);
}

// 0 -> blue, 1 -> red, through gray
std::string value_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(60.0 + 180.0 * t));
  const int g = static_cast<int>(std::lround(90.0 * (1.0 - std::abs(2.0 * t - 1.0)) + 60.0));
  const int b = static_cast<int>(std::lround(60.0 + 180.0 * (1.0 - t)));
  return color_hex(r, g, b);
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::ofstream open_svg(const std::filesystem::path& path, int width, int height,
                       const SvgOptions& opt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write SVG file: " + path.string());
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  if (opt.timestamp_comment) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    out << "<!-- generated at unix "
        << std::chrono::duration_cast<std::chrono::seconds>(now).count() << " -->\n";
  }
  return out;
}

}  // namespace

void write_correlation_svg(const std::filesystem::path& path, const CorrelationMatrix& m,
                           const SvgOptions& opt) {
  std::vector<std::size_t> valid_idx;
  for (std::size_t i = 0; i < m.feature_names.size(); ++i)
    if (m.valid[i]) valid_idx.push_back(i);
  const int n = static_cast<int>(valid_idx.size());
  const int cell = std::max(2, 640 / std::max(1, n));
  const int margin = 6;
  const int size = n * cell + 2 * margin;

  std::ofstream out = open_svg(path, size, size, opt);
  out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double r = m.r(static_cast<Eigen::Index>(valid_idx[static_cast<std::size_t>(a)]),
                           static_cast<Eigen::Index>(valid_idx[static_cast<std::size_t>(b)]));
      out << "<rect x=\"" << margin + b * cell << "\" y=\"" << margin + a * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << heat_color(std::abs(r)) << "\"/>\n";
    }
  out << "</svg>\n";
  if (!out) throw DataError("failed writing SVG file: " + path.string());
}

void write_shap_strip_svg(const std::filesystem::path& path, const ShapSummary& summary,
                          const FeatureTable& table, int max_features,
                          const SvgOptions& opt) {
  const int shown =
      std::min<int>(max_features, static_cast<int>(summary.ranking.size()));
  const int row_h = 18, label_w = 190, plot_w = 460, margin = 10;
  const int width = label_w + plot_w + 2 * margin;
  const int height = shown * row_h + 2 * margin;

  double max_abs_phi = 1e-12;
  for (const auto& row : summary.rows)
    max_abs_phi = std::max(max_abs_phi, row.phi.cwiseAbs().maxCoeff());

  std::ofstream out = open_svg(path, width, height, opt);
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  const double mid_x = label_w + margin + plot_w / 2.0;
  out << "<line x1=\"" << mid_x << "\" y1=\"" << margin << "\" x2=\"" << mid_x
      << "\" y2=\"" << height - margin << "\" stroke=\"#bbbbbb\"/>\n";

  for (int rank = 0; rank < shown; ++rank) {
    const auto& entry = summary.ranking[static_cast<std::size_t>(rank)];
    const int col = table.column_index(entry.feature);
    const double y = margin + rank * row_h + row_h / 2.0;
    out << "<text x=\"" << margin << "\" y=\"" << y + 4
        << "\" font-size=\"10\" font-family=\"monospace\">" << xml_escape(entry.feature)
        << "</text>\n";

    // value percentiles for coloring
    std::vector<double> col_values(static_cast<std::size_t>(table.rows()));
    for (Eigen::Index i = 0; i < table.rows(); ++i)
      col_values[static_cast<std::size_t>(i)] = table.values(i, col);
    std::vector<double> sorted = col_values;
    std::sort(sorted.begin(), sorted.end());

    for (std::size_t i = 0; i < summary.rows.size(); ++i) {
      const double phi = summary.rows[i].phi(col);
      const double cx = mid_x + (phi / max_abs_phi) * (plot_w / 2.0 - 4.0);
      const double v = col_values[i];
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin();
      const double pct =
          sorted.size() > 1 ? static_cast<double>(lo) / static_cast<double>(sorted.size() - 1)
                            : 0.5;
      out << "<circle cx=\"" << cx << "\" cy=\"" << y << "\" r=\"2\" fill=\""
          << value_color(pct) << "\" fill-opacity=\"0.6\"/>\n";
    }
  }
  out << "</svg>\n";
  if (!out) throw DataError("failed writing SVG file: " + path.string());
}

void write_feature_ranges_csv(const std::filesystem::path& path, const FeatureTable& table) {
  CsvTable csv;
  csv.header = {"feature", "label", "min", "q25", "median", "q75", "max"};
  for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
    for (int cls : {0, 1}) {
      std::vector<double> vals;
      for (Eigen::Index i = 0; i < table.rows(); ++i)
        if (table.labels[static_cast<std::size_t>(i)] == cls)
          vals.push_back(table.values(i, static_cast<Eigen::Index>(j)));
      if (vals.empty()) continue;
      std::sort(vals.begin(), vals.end());
      CsvRow row;
      row.push_back(table.feature_names[j]);
      row.push_back(std::to_string(cls));
      row.push_back(fmt_double(vals.front()));
      row.push_back(fmt_double(quantile_sorted(vals, 0.25)));
      row.push_back(fmt_double(quantile_sorted(vals, 0.5)));
      row.push_back(fmt_double(quantile_sorted(vals, 0.75)));
      row.push_back(fmt_double(vals.back()));
      csv.rows.push_back(std::move(row));
    }
  }
  write_csv(path, csv);
}

}  // namespace tk
