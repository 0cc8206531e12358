#include "greybox/json_util.hpp"

#include <algorithm>

#include "greybox/errors.hpp"

namespace greybox::json_util {

std::string canonical_dump(const json& value) {
  return value.dump(2, ' ', false, json::error_handler_t::strict) + "\n";
}

json parse_document(std::string_view bytes) {
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, bytes.size());
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(bytes.begin(), bytes.begin() + static_cast<long>(offset), '\n'));
    auto last_nl = bytes.substr(0, offset).rfind('\n');
    std::size_t column = last_nl == std::string_view::npos ? offset + 1 : offset - last_nl;
    throw Error(ErrorKind::Parse,
                "malformed JSON at line " + std::to_string(line) + ", column " +
                    std::to_string(column),
                {{"line", line}, {"column", column}});
  }
}

void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Parse, path + ": " + what, {{"field", path}});
}

namespace {
std::string type_name(const json& v) { return v.type_name(); }
}  // namespace

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) fail(path, "expected string, got " + type_name(value));
  return value.get<std::string>();
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) fail(path, "expected number, got " + type_name(value));
  return value.get<double>();
}

std::int64_t as_integer(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail(path, "expected integer, got " + type_name(value));
  return value.get<std::int64_t>();
}

bool as_boolean(const json& value, const std::string& path) {
  if (!value.is_boolean()) fail(path, "expected boolean, got " + type_name(value));
  return value.get<bool>();
}

const json& as_array(const json& value, const std::string& path) {
  if (!value.is_array()) fail(path, "expected array, got " + type_name(value));
  return value;
}

ObjectReader::ObjectReader(const json& object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected object");
}

std::string ObjectReader::child_path(std::string_view key) const {
  return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
}

bool ObjectReader::has(std::string_view key) const {
  return object_.find(std::string(key)) != object_.end();
}

const json& ObjectReader::required(std::string_view key) {
  seen_.emplace(key);
  auto it = object_.find(std::string(key));
  if (it == object_.end()) fail(child_path(key), "missing required field");
  if (it->is_null()) fail(child_path(key), "must not be null");
  return *it;
}

const json* ObjectReader::optional(std::string_view key) {
  seen_.emplace(key);
  auto it = object_.find(std::string(key));
  if (it == object_.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string ObjectReader::string(std::string_view key) {
  return as_string(required(key), child_path(key));
}
double ObjectReader::number(std::string_view key) {
  return as_number(required(key), child_path(key));
}
std::int64_t ObjectReader::integer(std::string_view key) {
  return as_integer(required(key), child_path(key));
}
bool ObjectReader::boolean(std::string_view key) {
  return as_boolean(required(key), child_path(key));
}
const json& ObjectReader::array(std::string_view key) {
  return as_array(required(key), child_path(key));
}
const json& ObjectReader::object(std::string_view key) {
  const json& v = required(key);
  if (!v.is_object()) fail(child_path(key), "expected object");
  return v;
}

void ObjectReader::finish() const {
  for (const auto& [key, _] : object_.items()) {
    if (seen_.find(key) == seen_.end()) fail(child_path(key), "unknown field (not part of schema_version 1)");
  }
}

}  // namespace greybox::json_util
