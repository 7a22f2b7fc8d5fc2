#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "util/error.hpp"

namespace signseg::jsonutil {

using nlohmann::json;

// Rejects keys outside `allowed`, reporting the offending dotted path.
void check_allowed_keys(const json& obj, const std::string& path,
                        std::initializer_list<std::string_view> allowed);

const json* find(const json& obj, const std::string& key);

double get_number(const json& obj, const std::string& path,
                  const std::string& key, double fallback);
std::int64_t get_int(const json& obj, const std::string& path,
                     const std::string& key, std::int64_t fallback);
bool get_bool(const json& obj, const std::string& path, const std::string& key,
              bool fallback);
std::string get_string(const json& obj, const std::string& path,
                       const std::string& key, const std::string& fallback);

json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace signseg::jsonutil
