#ifndef OKFLOW_SVG_HPP
#define OKFLOW_SVG_HPP

#include <string>
#include <utility>
#include <vector>

namespace okflow {

// Minimal deterministic SVG scatter/path/polygon writer for the n <= 2 plots.
class SvgPlot {
public:
  SvgPlot(double width = 640, double height = 480) : width_(width), height_(height) {}

  void add_points(const std::vector<std::pair<double, double>>& pts, const std::string& color, double radius = 1.5);
  void add_path(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke = 1.0);
  void add_polygon(const std::vector<std::pair<double, double>>& pts, const std::string& color, double stroke = 1.5);

  std::string render() const;

private:
  struct Layer {
    enum class Kind { points, path, polygon } kind;
    std::vector<std::pair<double, double>> pts;
    std::string color;
    double size;
  };
  double width_, height_;
  std::vector<Layer> layers_;
};

} // namespace okflow

#endif
