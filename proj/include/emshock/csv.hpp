#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace emshock {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  int require_column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// Numeric cells are written with 12 significant digits.
std::string format_numeric(double value);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header);
  ~CsvWriter();

  void field(const std::string& value);
  void field(double value);
  void end_row();

 private:
  std::string buffer_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
};

double parse_double(const std::string& cell, const std::string& context);

}  // namespace emshock
