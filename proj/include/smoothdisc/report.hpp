#pragma once

// Output helpers for experiment runs: CSV tables, simple SVG line plots and
// a JSON metadata record.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace smoothdisc::report {

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  [[nodiscard]] std::string str() const;
  void write(const std::filesystem::path& path) const;
  [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest round-trip decimal for a double ("%.17g" trimmed).
std::string fmt(double v);
std::string fmt(std::int64_t v);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
};

std::string svg_line_plot(const std::vector<Series>& series, const PlotSpec& spec);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Metadata written next to every run's outputs.
nlohmann::json run_metadata(const std::string& command, const nlohmann::json& config);

}  // namespace smoothdisc::report
