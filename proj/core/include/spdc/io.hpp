#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace spdc {

/// Fixed 9-significant-digit text, '.' decimal separator.
std::string format_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  /// LF line endings; creates parent directories.
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string text_;
};

using Sidecar = std::vector<std::pair<std::string, std::string>>;

/// `key = value` lines in insertion order.
void write_sidecar(const std::filesystem::path& path, const Sidecar& entries);

}  // namespace spdc
