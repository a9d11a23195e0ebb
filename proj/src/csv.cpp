#include "emshock/csv.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "emshock/errors.hpp"

namespace emshock {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

int CsvTable::require_column(const std::string& name) const {
  const int idx = column(name);
  if (idx < 0)
    throw Error(ErrorKind::SchemaMismatch, "missing column '" + name + "'");
  return idx;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::ConfigPathMissing, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorKind::SchemaMismatch, "empty file " + path.string());
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.header.size())
      throw Error(ErrorKind::SchemaMismatch,
                  "row width mismatch in " + path.string());
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::string format_numeric(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += header[i];
  }
  buffer_ += '\n';
}

CsvWriter::~CsvWriter() {
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
}

void CsvWriter::field(const std::string& value) {
  if (in_row_) buffer_ += ',';
  buffer_ += value;
  ++in_row_;
}

void CsvWriter::field(double value) { field(format_numeric(value)); }

void CsvWriter::end_row() {
  buffer_ += '\n';
  in_row_ = 0;
}

double parse_double(const std::string& cell, const std::string& context) {
  if (cell.empty() || cell == "NA" || cell == "nan" || cell == ".")
    return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size())
      throw Error(ErrorKind::SchemaMismatch,
                  "bad numeric '" + cell + "' in " + context);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    throw Error(ErrorKind::SchemaMismatch,
                "bad numeric '" + cell + "' in " + context);
  }
}

}  // namespace emshock
