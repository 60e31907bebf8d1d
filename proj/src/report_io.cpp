#include "specreg/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "specreg/errors.hpp"

namespace specreg {

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns, std::vector<std::string> comments)
    : width_(columns.size()) {
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_) throw ShapeError("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_real(v));
  row(cells);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
}

namespace {

bool parse_double(std::string_view text, double& value) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

void read_xy_csv(const std::filesystem::path& path, std::vector<double>& x, std::vector<double>& y) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file " + path.string());
  x.clear();
  y.clear();
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    auto comma = line.find(',');
    double a = 0.0;
    double b = 0.0;
    bool ok = comma != std::string::npos && line.find(',', comma + 1) == std::string::npos &&
              parse_double(std::string_view(line).substr(0, comma), a) &&
              parse_double(std::string_view(line).substr(comma + 1), b);
    if (!ok) {
      if (header_allowed && comma != std::string::npos) {
        header_allowed = false;
        continue;
      }
      throw DataError("malformed row " + std::to_string(line_no) + " in " + path.string());
    }
    header_allowed = false;
    x.push_back(a);
    y.push_back(b);
  }
  if (x.empty()) throw DataError("data file " + path.string() + " has no rows");
}

}  // namespace specreg
