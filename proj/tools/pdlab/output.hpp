#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pdlab::cli {

struct Table {
  std::string name;  // file stem, e.g. "dichotomy"
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool equal_aspect = false;
  std::vector<Series> series;
};

/// Numbers are printed with %.17g so a value survives a round trip.
std::string format_number(double v);
std::string to_csv(const Table& t);
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& dir, const Table& t);

std::string to_svg(const Chart& c);
void write_svg(const std::filesystem::path& dir, const Chart& c);

}  // namespace pdlab::cli
