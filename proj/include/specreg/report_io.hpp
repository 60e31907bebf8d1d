#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace specreg {

// Round-trippable decimal representation ("%.17g").
std::string format_real(double value);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

// Minimal CSV builder. Optional comment lines are emitted first, each prefixed by "# ".
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns, std::vector<std::string> comments = {});

  void row(const std::vector<std::string>& cells);
  void row(std::initializer_list<double> values);
  std::string str() const { return out_.str(); }

 private:
  std::size_t width_;
  std::ostringstream out_;
};

void write_text_file(const std::filesystem::path& path, std::string_view content);

// Parse a two-column numeric CSV (x, y). Lines starting with '#' and a non-numeric header
// line are skipped. Throws DataError on malformed rows or when no rows are present.
void read_xy_csv(const std::filesystem::path& path, std::vector<double>& x, std::vector<double>& y);

}  // namespace specreg
