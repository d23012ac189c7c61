#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace harmscan {

using Json = nlohmann::json;

namespace text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Trims, lowercases and collapses runs of whitespace to one space.
std::string normalize(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);

}  // namespace text

// RFC 4180 CSV. Quoted fields may contain separators, quotes ("") and newlines.
class CsvTable {
 public:
  static CsvTable parse(std::istream& in);
  static CsvTable read_file(const std::filesystem::path& path);

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::optional<std::size_t> column(std::string_view name) const;
  // Throws SchemaError naming the missing column.
  std::size_t require_column(std::string_view name) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(std::span<const std::string> fields);
  void row(std::initializer_list<std::string> fields);

 private:
  std::ostream& out_;
};

std::string csv_escape(std::string_view field);

// Line-delimited JSON. Blank lines are skipped on read.
std::vector<Json> read_jsonl(std::istream& in);
std::vector<Json> read_jsonl_file(const std::filesystem::path& path);
void write_jsonl_file(const std::filesystem::path& path, std::span<const Json> lines);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view body);
// Non-empty, non-comment ('#') trimmed lines.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

std::string base64_encode(std::span<const unsigned char> bytes);
std::vector<unsigned char> base64_decode(std::string_view encoded);
std::string sha256_hex(std::string_view data);

// Stable 64-bit FNV-1a, used to derive per-video seeds.
std::uint64_t fnv1a64(std::string_view data);

// Half-up rounding of 100*count/total to hundredths, as an integer number of
// hundredths of a percent. total must be positive.
std::int64_t percent_hundredths(std::int64_t count, std::int64_t total);
std::string format_hundredths(std::int64_t hundredths);
std::string format_fixed(double value, int decimals);

}  // namespace harmscan
