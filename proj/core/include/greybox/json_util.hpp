#pragma once

// Strict JSON reading with field paths for error messages, plus the
// canonical writer shared by every file format (sorted keys, 2-space
// indent, trailing newline).

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace greybox::json_util {

using nlohmann::json;

std::string canonical_dump(const json& value);

/// Parses a document; syntax errors become Error{Parse} with line/column.
json parse_document(std::string_view bytes);

[[noreturn]] void fail(const std::string& path, const std::string& what);

/// Reads fields of one JSON object, remembering which keys were consumed so
/// that finish() can reject unknown fields.
class ObjectReader {
 public:
  ObjectReader(const json& object, std::string path);

  const std::string& path() const noexcept { return path_; }
  std::string child_path(std::string_view key) const;

  bool has(std::string_view key) const;
  /// Present and non-null, else Error{Parse} naming the field.
  const json& required(std::string_view key);
  /// nullptr when absent or null.
  const json* optional(std::string_view key);

  std::string string(std::string_view key);
  double number(std::string_view key);
  std::int64_t integer(std::string_view key);
  bool boolean(std::string_view key);
  const json& array(std::string_view key);
  const json& object(std::string_view key);

  /// Error{Parse} if the object has keys that were never read.
  void finish() const;

 private:
  const json& object_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

std::string as_string(const json& value, const std::string& path);
double as_number(const json& value, const std::string& path);
std::int64_t as_integer(const json& value, const std::string& path);
bool as_boolean(const json& value, const std::string& path);
const json& as_array(const json& value, const std::string& path);

}  // namespace greybox::json_util
