#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "pocs/experiments.hpp"

namespace pocs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 170.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_plot(std::span<const LabeledCurve> curves) {
  for (const auto& c : curves) {
    if (c.s < 1) throw ParameterError("emit_plot: s must be >= 1");
    if (c.s != curves.front().s) throw ParameterError("emit_plot: curves have different s");
  }
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -x_min;
  for (const auto& c : curves) {
    for (const auto& r : c.curve.rows) {
      const double x = static_cast<double>(r.m) / c.s;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (!(x_min < x_max)) {
    x_min = std::isfinite(x_min) ? x_min - 1.0 : 0.0;
    x_max = std::isfinite(x_max) ? x_max + 1.0 : 1.0;
  }
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - y) * plot_h; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

  // axes and ticks
  os << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft + plot_w << "\" y2=\"" << py(0) << "\"/>\n"
     << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kLeft << "\" y2=\"" << py(1) << "\"/>\n"
     << "</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = i / 5.0;
    os << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 5.0;
    os << "<text x=\"" << num(px(x)) << "\" y=\"" << py(0) + 16 << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">m/s</text>\n"
     << "<text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + plot_h / 2 << ")\">success rate</text>\n"
     << "</g>\n";

  std::size_t idx = 0;
  for (const auto& c : curves) {
    const char* color = kColors[idx % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& r : c.curve.rows) {
      if (!first) os << ' ';
      first = false;
      os << num(px(static_cast<double>(r.m) / c.s)) << ',' << num(py(r.rate));
    }
    os << "\"/>\n";
    const double ly = kTop + 14.0 + 18.0 * static_cast<double>(idx);
    const double lx = kLeft + plot_w + 12.0;
    os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 20 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text class=\"legend\" x=\"" << lx + 26 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << xml_escape(c.label) << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

void emit_plot(std::span<const LabeledCurve> curves, const std::filesystem::path& path) {
  const std::string svg = render_plot(curves);
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os << svg;
  os.flush();
  if (!os) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace pocs
