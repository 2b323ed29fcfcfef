#pragma once

// Ordered result table with CSV (17 significant digits) and SVG line-chart output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "../errors.hpp"

namespace zfaging::harness {

using Cell = std::variant<long long, double, std::string>;

inline std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  const double v = std::get<double>(c);
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != header.size()) throw InvalidArgument("table: row width does not match the header");
    rows.push_back(std::move(row));
  }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw InvalidArgument("table: no column '" + name + "'");
  }

  double number(std::size_t row, const std::string& name) const {
    const Cell& c = rows.at(row).at(column(name));
    if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    throw InvalidArgument("table: column '" + name + "' is not numeric");
  }

  void write_csv(std::ostream& os) const {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_cell(r[i]);
      os << '\n';
    }
  }

  std::string csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

/// Line chart of y_columns against x, one polyline per (series value, y column).
inline std::string render_svg(const Table& t, const std::string& x, const std::vector<std::string>& y_columns,
                              const std::string& series = "", const std::string& title = "", bool log_y = false) {
  const double W = 720, H = 440, ml = 70, mr = 180, mt = 40, mb = 50;
  std::map<std::string, std::vector<std::pair<double, double>>> lines;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double xv = t.number(r, x);
    const std::string key = series.empty() ? "" : series + "=" + format_cell(t.rows[r][t.column(series)]) + " ";
    for (const auto& yc : y_columns) {
      double yv = t.number(r, yc);
      if (!std::isfinite(yv) || (log_y && !(yv > 0.0))) continue;
      if (log_y) yv = std::log10(yv);
      lines[key + yc].push_back({xv, yv});
      x0 = std::min(x0, xv);
      x1 = std::max(x1, xv);
      y0 = std::min(y0, yv);
      y1 = std::max(y1, yv);
    }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << ml << "\" y=\"20\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - mb + 15 << "\" text-anchor=\"middle\">" << format_cell(std::round(xv * 1000) / 1000) << "</text>\n";
    const double label = log_y ? std::pow(10.0, yv) : yv;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", label);
    os << "<text x=\"" << ml - 5 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf << "</text>\n";
  }
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x << "</text>\n";
  int c = 0;
  for (const auto& [name, pts] : lines) {
    const char* col = colors[c % 10];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [a, b] : pts) os << px(a) << ',' << py(b) << ' ';
    os << "\"/>\n";
    os << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 14 * c + 10 << "\" fill=\"" << col << "\">" << name << "</text>\n";
    ++c;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace zfaging::harness
