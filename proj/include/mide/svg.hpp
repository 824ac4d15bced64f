#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mide/matrix.hpp"

namespace mide::svg {

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  std::string label;
  bool line = false;  // polyline instead of dots
};

struct Segment {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  std::string color = "#888888";
  double width = 0.6;
};

// A single axis box with scatter/line series and free segments. Axis ranges
// are taken from the data with a small margin.
class Figure {
 public:
  Figure(std::string title, std::string x_label, std::string y_label);

  void add(Series series) { series_.push_back(std::move(series)); }
  void add(Segment segment) { segments_.push_back(std::move(segment)); }
  std::string render() const;

 private:
  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  std::vector<Segment> segments_;
};

// Grey-scale matrix plot, darker for larger entries; zero entries stay white.
std::string heatmap(const Matrix& values, const std::string& title);

}  // namespace mide::svg
