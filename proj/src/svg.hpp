#pragma once

// Minimal SVG assembly for the maze/graph visualizations. Output formatting
// is fixed ("%.2f" coordinates) so identical inputs give identical bytes.

#include <string>
#include <vector>

#include "ttgs/types.hpp"

namespace ttgs::detail {

class SvgWriter {
 public:
  SvgWriter(Scalar width, Scalar height);

  void rect(Scalar x, Scalar y, Scalar w, Scalar h, const std::string& fill);
  void circle(Scalar cx, Scalar cy, Scalar r, const std::string& fill);
  void polyline(const std::vector<std::pair<Scalar, Scalar>>& points,
                const std::string& stroke, Scalar stroke_width);
  void text(Scalar x, Scalar y, Scalar size, const std::string& content,
            const std::string& fill = "#000000");

  std::string finish() const;

 private:
  std::string body_;
  Scalar width_;
  Scalar height_;
};

std::string rgb_hex(double r, double g, double b);  // components in [0, 1]

// Perceptual dark-to-light colormap for t in [0, 1].
std::string colormap(Scalar t);

}  // namespace ttgs::detail
