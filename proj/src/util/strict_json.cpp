#include "util/strict_json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace signseg::jsonutil {

namespace {

[[noreturn]] void type_error(const std::string& path, const std::string& key,
                             const char* expected, const json& got) {
  throw ConfigError("config: field '" + path + "." + key + "' must be " +
                    expected + ", got " + std::string(got.type_name()));
}

}  // namespace

void check_allowed_keys(const json& obj, const std::string& path,
                        std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("config: '" + path + "' must be an object, got " +
                      std::string(obj.type_name()));
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](std::string_view k) { return k == it.key(); });
    if (!known) {
      throw ConfigError("config: unknown key '" + path + "." + it.key() + "'");
    }
  }
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number()) type_error(path, key, "a number", *v);
  return v->get<double>();
}

std::int64_t get_int(const json& obj, const std::string& path,
                     const std::string& key, std::int64_t fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer()) type_error(path, key, "an integer", *v);
  return v->get<std::int64_t>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) type_error(path, key, "a boolean", *v);
  return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) type_error(path, key, "a string", *v);
  return v->get<std::string>();
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace signseg::jsonutil
