#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fcg/binary_io.hpp"
#include "fcg/fracture.hpp"
#include "fcg/geometry.hpp"
#include "fcg/twin.hpp"

namespace fcg::report {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string replay_csv(const std::vector<ReplayRow>& rows, const std::string& config_hash) {
  std::ostringstream os;
  os << "sample_id,t_obs_fraction,rmse,ssim,life_truth,life_pred,accuracy,step_index,rare,config_hash\n";
  for (const auto& r : rows)
    os << r.sample_id << ',' << num(r.t_obs_fraction) << ',' << num(r.rmse) << ',' << num(r.ssim) << ','
       << num(r.life_truth) << ',' << num(r.life_pred) << ',' << num(r.accuracy) << ',' << r.step_index << ','
       << (r.rare ? 1 : 0) << ',' << config_hash << '\n';
  return os.str();
}

/// Path points of the truth, observed and predicted cracks, one per row.
inline std::string path_csv(const std::vector<std::pair<std::string, std::vector<Point2>>>& series,
                            const std::string& config_hash) {
  std::ostringstream os;
  os << "series,index,x_m,y_m,config_hash\n";
  for (const auto& [name, pts] : series)
    for (std::size_t i = 0; i < pts.size(); ++i)
      os << name << ',' << i << ',' << num(pts[i].x) << ',' << num(pts[i].y) << ',' << config_hash << '\n';
  return os.str();
}

struct Style {
  std::string name, color, dash;
};

/// Plate outline with overlaid crack polylines; coordinates in mm.
inline std::string overlay_svg(const PlateSpec& plate, const std::vector<std::pair<Style, std::vector<Point2>>>& series,
                               const std::string& title, const std::string& config_hash) {
  const double scale = 400.0 / std::max(plate.width, plate.height);
  const double w = plate.width * scale, h = plate.height * scale;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w + 40) << "\" height=\"" << num(h + 80)
     << "\">\n<!-- config_hash " << config_hash << " -->\n";
  os << "<text x=\"20\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"20\" y=\"30\" width=\"" << num(w) << "\" height=\"" << num(h)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  double legend_y = h + 50;
  for (const auto& [style, pts] : series) {
    os << "<polyline fill=\"none\" stroke=\"" << style.color << "\" stroke-width=\"2\"";
    if (!style.dash.empty()) os << " stroke-dasharray=\"" << style.dash << "\"";
    os << " points=\"";
    for (const auto& p : pts) os << num(20 + p.x * scale) << ',' << num(30 + (plate.height - p.y) * scale) << ' ';
    os << "\"/>\n";
    os << "<text x=\"20\" y=\"" << num(legend_y) << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
       << style.color << "\">" << style.name << "</text>\n";
    legend_y += 14;
  }
  os << "</svg>\n";
  return os.str();
}

struct Curve {
  std::string name, color;
  std::vector<std::pair<double, double>> points;
};

/// Line chart; one panel, shared axes fitted to the data.
inline std::string curves_svg(const std::vector<Curve>& curves, const std::string& title, const std::string& x_label,
                              const std::string& y_label, const std::string& config_hash) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& c : curves)
    for (const auto& [x, y] : c.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x0 > x1) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-12) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y1 = y0 + 1;
  const double W = 420, H = 260, L = 60, T = 30;
  const auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * W; };
  const auto sy = [&](double y) { return T + H - (y - y0) / (y1 - y0) * H; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W + L + 120) << "\" height=\"" << num(H + T + 50)
     << "\">\n<!-- config_hash " << config_hash << " -->\n";
  os << "<text x=\"" << num(L) << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"" << num(L) << "\" y=\"" << num(T) << "\" width=\"" << num(W) << "\" height=\"" << num(H)
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << num(L + W / 2) << "\" y=\"" << num(T + H + 35) << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << x_label << "</text>\n";
  os << "<text x=\"4\" y=\"" << num(T + H / 2) << "\" font-family=\"sans-serif\" font-size=\"11\">" << y_label << "</text>\n";
  os << "<text x=\"" << num(L - 4) << "\" y=\"" << num(T + H) << "\" font-size=\"9\" text-anchor=\"end\">" << num(y0)
     << "</text>\n<text x=\"" << num(L - 4) << "\" y=\"" << num(T + 8) << "\" font-size=\"9\" text-anchor=\"end\">"
     << num(y1) << "</text>\n";
  os << "<text x=\"" << num(L) << "\" y=\"" << num(T + H + 14) << "\" font-size=\"9\">" << num(x0)
     << "</text>\n<text x=\"" << num(L + W) << "\" y=\"" << num(T + H + 14) << "\" font-size=\"9\" text-anchor=\"end\">"
     << num(x1) << "</text>\n";
  double ly = T + 10;
  for (const auto& c : curves) {
    os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : c.points) os << num(sx(x)) << ',' << num(sy(y)) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : c.points)
      os << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y)) << "\" r=\"3\" fill=\"" << c.color << "\"/>\n";
    os << "<text x=\"" << num(L + W + 8) << "\" y=\"" << num(ly) << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
       << c.color << "\">" << c.name << "</text>\n";
    ly += 14;
  }
  os << "</svg>\n";
  return os.str();
}

/// Mean of a replay column per observation fraction, optionally restricted to rare samples.
template <class Field>
std::vector<std::pair<double, double>> mean_by_fraction(const std::vector<ReplayRow>& rows, Field field,
                                                        bool rare_only = false) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& r : rows) {
    if (rare_only && !r.rare) continue;
    auto& a = acc[r.t_obs_fraction];
    a.first += field(r);
    ++a.second;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [f, a] : acc) out.emplace_back(f, a.first / static_cast<double>(a.second));
  return out;
}

}  // namespace fcg::report
