#include "ipdrl/csv.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace ipdrl {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     std::initializer_list<std::string_view> header)
    : out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  bool first = true;
  for (std::string_view h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != columns_) throw std::logic_error("csv row has wrong column count");
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw std::runtime_error("csv write failed");
}

std::string field(double v) { return format_number(v); }
std::string field(std::int64_t v) { return std::to_string(v); }
std::string field(int v) { return std::to_string(v); }
std::string field(bool v) { return v ? "1" : "0"; }
std::string field(std::string_view v) { return std::string(v); }
std::string field(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : ""; }

}  // namespace ipdrl
