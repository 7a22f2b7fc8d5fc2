#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "util/error.hpp"
#include "util/mat.hpp"

namespace signseg {

// Single-file container used for both sample files ("SGSG") and
// checkpoints ("SGCK"):
//
//   magic[4] | version u32 LE | header_len u64 LE | header JSON | payload
//
// The header holds a free-form "meta" object plus an array directory;
// each entry gives name, dtype ("f32"|"f64"|"u8"), shape, and the byte
// offset of the raw little-endian data relative to the payload start.
// Arrays are stored row-major in directory order, so writing the same
// container twice produces identical bytes.

struct ArrayRecord {
  std::string name;
  std::string dtype;
  std::vector<std::int64_t> shape;
  std::vector<std::uint8_t> bytes;

  std::int64_t element_count() const;
};

struct Container {
  std::uint32_t version = 1;
  nlohmann::json meta = nlohmann::json::object();
  std::vector<ArrayRecord> arrays;

  const ArrayRecord* find(const std::string& name) const;
  const ArrayRecord& require(const std::string& name) const;
  bool has(const std::string& name) const { return find(name) != nullptr; }

  void add_f32(const std::string& name, const MatF& m);
  void add_f64(const std::string& name, const MatD& m);
  void add_u8(const std::string& name, const std::vector<std::uint8_t>& v);

  // Shape-checked extraction. rows/cols of -1 accept any extent.
  MatF get_f32(const std::string& name, std::int64_t rows = -1,
               std::int64_t cols = -1) const;
  MatD get_f64(const std::string& name, std::int64_t rows = -1,
               std::int64_t cols = -1) const;
  std::vector<std::uint8_t> get_u8(const std::string& name,
                                   std::int64_t count = -1) const;
};

void write_container(const std::filesystem::path& path, const char magic[4],
                     const Container& c);
Container read_container(const std::filesystem::path& path,
                         const char magic[4]);

inline constexpr char kSampleMagic[4] = {'S', 'G', 'S', 'G'};
inline constexpr char kCheckpointMagic[4] = {'S', 'G', 'C', 'K'};

}  // namespace signseg
