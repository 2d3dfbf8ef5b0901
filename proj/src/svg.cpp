#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ttgs::detail {

namespace {

std::string num(Scalar x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

// XML-escape the few characters that can appear in labels.
std::string escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

SvgWriter::SvgWriter(Scalar width, Scalar height)
    : width_(width), height_(height) {}

void SvgWriter::rect(Scalar x, Scalar y, Scalar w, Scalar h,
                     const std::string& fill) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
           num(w) + "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgWriter::circle(Scalar cx, Scalar cy, Scalar r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(r) + "\" fill=\"" + fill + "\"/>\n";
}

void SvgWriter::polyline(const std::vector<std::pair<Scalar, Scalar>>& points,
                         const std::string& stroke, Scalar stroke_width) {
  body_ += "<polyline points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0) {
      body_ += ' ';
    }
    body_ += num(points[i].first) + "," + num(points[i].second);
  }
  body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_width) + "\"/>\n";
}

void SvgWriter::text(Scalar x, Scalar y, Scalar size, const std::string& content,
                     const std::string& fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
           num(size) + "\" font-family=\"monospace\" fill=\"" + fill + "\">" +
           escape(content) + "</text>\n";
}

std::string SvgWriter::finish() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
         "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) +
         " " + num(height_) + "\">\n" + body_ + "</svg>\n";
}

std::string rgb_hex(double r, double g, double b) {
  auto to_byte = [](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", to_byte(r), to_byte(g),
                to_byte(b));
  return buf;
}

std::string colormap(Scalar t) {
  static const double stops[][3] = {
      {0.267, 0.005, 0.329}, {0.254, 0.265, 0.530}, {0.164, 0.471, 0.558},
      {0.135, 0.659, 0.518}, {0.478, 0.821, 0.318}, {0.993, 0.906, 0.144},
  };
  constexpr int n = 6;
  if (std::isnan(t)) {
    t = 0.0;
  }
  t = std::clamp(t, 0.0, 1.0) * (n - 1);
  const int i = std::min(static_cast<int>(t), n - 2);
  const double f = t - i;
  return rgb_hex(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]),
                 stops[i][1] + f * (stops[i + 1][1] - stops[i][1]),
                 stops[i][2] + f * (stops[i + 1][2] - stops[i][2]));
}

}  // namespace ttgs::detail
