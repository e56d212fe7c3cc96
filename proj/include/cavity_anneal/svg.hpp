#pragma once

#include <string>
#include <vector>

namespace cavity_anneal::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Values are indexed [y][x]; non-finite cells are left blank.
struct Heatmap {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::vector<double>> values;
};

std::string render(const LinePlot& plot);
std::string render(const Heatmap& map);

}  // namespace cavity_anneal::svg
