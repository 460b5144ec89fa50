#pragma once

#include <string>
#include <vector>

namespace echoeq {

/// Fixed-precision text for CSV cells; stable across runs.
std::string num(double v);

/// Header plus rows; cells are written verbatim (no quoting needed for our fields).
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  [[nodiscard]] std::string str() const;
  [[nodiscard]] std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace echoeq
