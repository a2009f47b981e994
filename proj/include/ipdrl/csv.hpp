#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ipdrl {

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double v);

/// Comma-separated output with a fixed header. Fields are written verbatim;
/// callers pass values already formatted with format_number.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

  void row(const std::vector<std::string>& fields);
  std::size_t columns() const { return columns_; }

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string field(double v);
std::string field(std::int64_t v);
std::string field(int v);
std::string field(bool v);
std::string field(std::string_view v);
/// Empty field for an absent value.
std::string field(const std::optional<std::int64_t>& v);

}  // namespace ipdrl
