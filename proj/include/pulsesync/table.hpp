#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pulsesync {

inline constexpr const char* kToolVersion = "pulsesync 0.1.0";

// Rectangular numeric table with an ordered provenance header.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> provenance;

  void add_row(std::vector<double> row);
  std::size_t column_index(const std::string& name) const;  // throws ValidationError
  std::vector<double> column(const std::string& name) const;
  void validate() const;
};

void write_csv(const ResultTable& table, std::ostream& out);
std::string to_csv(const ResultTable& table);
ResultTable read_csv(std::istream& in);

struct PlotSpec {
  std::string x;
  std::vector<std::string> y;
  // Error bars drawn on the first y series.
  std::optional<std::string> err_lo;
  std::optional<std::string> err_hi;
  bool log_x = false;
  bool log_y = false;
  std::string title;
};

void write_svg(const ResultTable& table, const PlotSpec& spec, std::ostream& out);
std::string to_svg(const ResultTable& table, const PlotSpec& spec);

// Writes text to path, or to stdout when path is empty or "-".
void write_output(const std::filesystem::path& path, const std::string& text);

}  // namespace pulsesync
