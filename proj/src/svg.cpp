#include "okflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace okflow {

void SvgPlot::add_points(const std::vector<std::pair<double, double>>& pts, const std::string& color, double radius) {
  layers_.push_back(Layer{Layer::Kind::points, pts, color, radius});
}

void SvgPlot::add_path(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke) {
  layers_.push_back(Layer{Layer::Kind::path, pts, color, stroke});
}

void SvgPlot::add_polygon(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke) {
  layers_.push_back(Layer{Layer::Kind::polygon, pts, color, stroke});
}

std::string SvgPlot::render() const {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool seen = false;
  for (const auto& layer : layers_)
    for (const auto& [x, y] : layer.pts) {
      if (!seen) {
        xmin = xmax = x;
        ymin = ymax = y;
        seen = true;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  double spanx = std::max(xmax - xmin, 1e-9), spany = std::max(ymax - ymin, 1e-9);
  double margin = 24;
  auto tx = [&](double x) { return margin + (x - xmin) / spanx * (width_ - 2 * margin); };
  auto ty = [&](double y) { return height_ - margin - (y - ymin) / spany * (height_ - 2 * margin); };

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_ << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& layer : layers_) {
    if (layer.kind == Layer::Kind::points) {
      for (const auto& [x, y] : layer.pts)
        os << "<circle cx=\"" << tx(x) << "\" cy=\"" << ty(y) << "\" r=\"" << layer.size << "\" fill=\"" << layer.color
           << "\"/>\n";
    } else {
      os << "<polyline points=\"";
      for (const auto& [x, y] : layer.pts) os << tx(x) << "," << ty(y) << " ";
      if (layer.kind == Layer::Kind::polygon && !layer.pts.empty())
        os << tx(layer.pts.front().first) << "," << ty(layer.pts.front().second);
      os << "\" fill=\"none\" stroke=\"" << layer.color << "\" stroke-width=\"" << layer.size << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace okflow
