#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eppmzi/spectra.hpp"

namespace eppmzi {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  const std::vector<double>& column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("CSV has no column '" + name + "'");
    return columns[static_cast<std::size_t>(it - header.begin())];
  }

  bool has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
  }
};

/// Shortest round-trip decimal form; identical doubles always print identically.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (table.header.size() != table.columns.size())
    throw std::invalid_argument("CSV header and column count differ");
  const std::size_t rows = table.rows();
  for (const auto& c : table.columns)
    if (c.size() != rows) throw std::invalid_argument("CSV columns have different lengths");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_double(table.columns[j][i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  const auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(s);
    while (std::getline(is, field, ',')) out.push_back(detail::trim(field));
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    const auto fields = split(line);
    if (table.header.empty()) {
      table.header = fields;
      table.columns.resize(fields.size());
      continue;
    }
    if (fields.size() != table.header.size())
      throw std::runtime_error(path.string() + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " columns");
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      double v = 0.0;
      if (f == "nan" || f == "NaN")
        v = std::numeric_limits<double>::quiet_NaN();
      else
        v = detail::parse_double(f, line_no);
      table.columns[j].push_back(v);
    }
  }
  if (table.header.empty()) throw std::runtime_error(path.string() + ": missing header row");
  return table;
}

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

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

// Ticks at 1, 2 or 5 times a power of ten, roughly `target` of them.
inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

inline std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

}  // namespace detail

namespace detail {

inline void render_panel(std::ostringstream& os, const PlotSpec& plot, double y0) {
  constexpr double W = 800, H = 500, left = 90, right = 20, top = 40, bottom = 60;
  constexpr std::array<const char*, 4> colors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
  if (!(ymax - ymin > 1e-12 * std::max(std::abs(ymin), std::abs(ymax)))) {
    const double pad = std::max(0.5 * std::abs(ymax), 0.5);
    ymin -= pad;
    ymax += pad;
  } else {
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
  }
  const double pw = W - left - right, ph = H - top - bottom;
  const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  os << "<g transform=\"translate(0 " << y0 << ")\">\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << detail::xml_escape(plot.title)
     << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : detail::nice_ticks(xmin, xmax)) {
    os << "<line x1=\"" << px(t) << "\" y1=\"" << top + ph << "\" x2=\"" << px(t) << "\" y2=\"" << top + ph + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(t) << "\" y=\"" << top + ph + 20 << "\" text-anchor=\"middle\">" << detail::tick_label(t)
       << "</text>\n";
  }
  for (double t : detail::nice_ticks(ymin, ymax)) {
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << left << "\" y2=\"" << py(t)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">" << detail::tick_label(t)
       << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(plot.x_label) << "</text>\n";
  os << "<text x=\"20\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << top + ph / 2
     << ")\">" << detail::xml_escape(plot.y_label) << "</text>\n";

  for (std::size_t si = 0; si < plot.series.size(); ++si) {
    const auto& s = plot.series[si];
    const char* color = colors[si % colors.size()];
    std::ostringstream pts;
    pts.setf(std::ios::fixed);
    pts.precision(2);
    std::size_t count = 0;
    const auto flush = [&] {
      if (count > 0)
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"" << pts.str()
           << "\"/>\n";
      pts.str("");
      count = 0;
    };
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts << (count ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
      ++count;
    }
    flush();
    if (!s.label.empty() && plot.series.size() > 1) {
      const double ly = top + 16 + 16 * static_cast<double>(si);
      os << "<line x1=\"" << left + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw - 125 << "\" y2=\""
         << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << left + pw - 118 << "\" y=\"" << ly << "\">" << detail::xml_escape(s.label) << "</text>\n";
    }
  }
  os << "</g>\n";
}

}  // namespace detail

/// Standalone SVG with the panels stacked vertically. NaN samples break a line.
inline std::string render_svg(const std::vector<PlotSpec>& panels) {
  constexpr double W = 800, H = 500;
  const double total = H * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << total << "\" viewBox=\"0 0 "
     << W << ' ' << total << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) detail::render_panel(os, panels[i], H * static_cast<double>(i));
  os << "</svg>\n";
  return os.str();
}

inline std::string render_svg(const PlotSpec& plot) { return render_svg(std::vector<PlotSpec>{plot}); }

inline void write_svg(const std::filesystem::path& path, const std::vector<PlotSpec>& panels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << render_svg(panels);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

inline void write_svg(const std::filesystem::path& path, const PlotSpec& plot) {
  write_svg(path, std::vector<PlotSpec>{plot});
}

}  // namespace eppmzi
