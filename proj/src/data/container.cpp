#include "data/container.hpp"

#include <cstring>
#include <fstream>

namespace signseg {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t read_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "f32") return 4;
  if (dtype == "f64") return 8;
  if (dtype == "u8") return 1;
  throw ValidationError("container: unsupported dtype '" + dtype + "'");
}

template <class S>
MatT<S> matrix_from_bytes(const ArrayRecord& a, std::int64_t rows,
                          std::int64_t cols) {
  if (a.shape.size() != 2) {
    throw ValidationError("container: array '" + a.name +
                          "' expected 2 dimensions, got " +
                          std::to_string(a.shape.size()));
  }
  if ((rows >= 0 && a.shape[0] != rows) || (cols >= 0 && a.shape[1] != cols)) {
    throw ValidationError(
        "container: array '" + a.name + "' has shape " +
        std::to_string(a.shape[0]) + "x" + std::to_string(a.shape[1]) +
        ", expected " + (rows >= 0 ? std::to_string(rows) : "*") + "x" +
        (cols >= 0 ? std::to_string(cols) : "*"));
  }
  MatT<S> m(a.shape[0], a.shape[1]);
  std::memcpy(m.data(), a.bytes.data(), a.bytes.size());
  return m;
}

template <class S>
ArrayRecord matrix_to_record(const std::string& name, const char* dtype,
                             const MatT<S>& m) {
  ArrayRecord a;
  a.name = name;
  a.dtype = dtype;
  a.shape = {m.rows(), m.cols()};
  a.bytes.resize(static_cast<std::size_t>(m.size()) * sizeof(S));
  std::memcpy(a.bytes.data(), m.data(), a.bytes.size());
  return a;
}

}  // namespace

std::int64_t ArrayRecord::element_count() const {
  std::int64_t n = 1;
  for (std::int64_t d : shape) n *= d;
  return n;
}

const ArrayRecord* Container::find(const std::string& name) const {
  for (const ArrayRecord& a : arrays) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

const ArrayRecord& Container::require(const std::string& name) const {
  const ArrayRecord* a = find(name);
  if (!a) throw ValidationError("container: missing array '" + name + "'");
  return *a;
}

void Container::add_f32(const std::string& name, const MatF& m) {
  arrays.push_back(matrix_to_record(name, "f32", m));
}

void Container::add_f64(const std::string& name, const MatD& m) {
  arrays.push_back(matrix_to_record(name, "f64", m));
}

void Container::add_u8(const std::string& name,
                       const std::vector<std::uint8_t>& v) {
  ArrayRecord a;
  a.name = name;
  a.dtype = "u8";
  a.shape = {static_cast<std::int64_t>(v.size())};
  a.bytes = v;
  arrays.push_back(std::move(a));
}

MatF Container::get_f32(const std::string& name, std::int64_t rows,
                        std::int64_t cols) const {
  const ArrayRecord& a = require(name);
  if (a.dtype != "f32") {
    throw ValidationError("container: array '" + name + "' has dtype " +
                          a.dtype + ", expected f32");
  }
  return matrix_from_bytes<float>(a, rows, cols);
}

MatD Container::get_f64(const std::string& name, std::int64_t rows,
                        std::int64_t cols) const {
  const ArrayRecord& a = require(name);
  if (a.dtype != "f64") {
    throw ValidationError("container: array '" + name + "' has dtype " +
                          a.dtype + ", expected f64");
  }
  return matrix_from_bytes<double>(a, rows, cols);
}

std::vector<std::uint8_t> Container::get_u8(const std::string& name,
                                            std::int64_t count) const {
  const ArrayRecord& a = require(name);
  if (a.dtype != "u8") {
    throw ValidationError("container: array '" + name + "' has dtype " +
                          a.dtype + ", expected u8");
  }
  if (count >= 0 && a.element_count() != count) {
    throw ValidationError("container: array '" + name + "' has " +
                          std::to_string(a.element_count()) +
                          " elements, expected " + std::to_string(count));
  }
  return a.bytes;
}

void write_container(const std::filesystem::path& path, const char magic[4],
                     const Container& c) {
  nlohmann::json dir = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const ArrayRecord& a : c.arrays) {
    const std::size_t expected = static_cast<std::size_t>(a.element_count()) *
                                 dtype_size(a.dtype);
    if (a.bytes.size() != expected) {
      throw ValidationError("container: array '" + a.name +
                            "' byte size does not match its shape");
    }
    dir.push_back({{"name", a.name},
                   {"dtype", a.dtype},
                   {"shape", a.shape},
                   {"byte_offset", offset},
                   {"byte_len", a.bytes.size()}});
    offset += a.bytes.size();
  }
  nlohmann::json header = {{"meta", c.meta}, {"arrays", dir}};
  const std::string header_text = header.dump();

  std::string head;
  head.append(magic, 4);
  put_u32(head, c.version);
  put_u64(head, header_text.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const ArrayRecord& a : c.arrays) {
    out.write(reinterpret_cast<const char*>(a.bytes.data()),
              static_cast<std::streamsize>(a.bytes.size()));
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Container read_container(const std::filesystem::path& path,
                         const char magic[4]) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 16) throw IoError("truncated file: " + path.string());
  if (std::memcmp(raw.data(), magic, 4) != 0) {
    throw ValidationError("bad magic in " + path.string() + ", expected '" +
                          std::string(magic, 4) + "'");
  }
  Container c;
  c.version = read_u32(raw.data() + 4);
  const std::uint64_t header_len = read_u64(raw.data() + 8);
  if (16 + header_len > raw.size()) {
    throw IoError("truncated header in " + path.string());
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(raw.begin() + 16,
                                   raw.begin() + 16 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("malformed container header in " + path.string() +
                          ": " + e.what());
  }
  c.meta = header.value("meta", nlohmann::json::object());
  const std::size_t payload_start = 16 + static_cast<std::size_t>(header_len);
  for (const auto& entry : header.value("arrays", nlohmann::json::array())) {
    ArrayRecord a;
    a.name = entry.at("name").get<std::string>();
    a.dtype = entry.at("dtype").get<std::string>();
    a.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const std::uint64_t off = entry.at("byte_offset").get<std::uint64_t>();
    const std::uint64_t len = entry.at("byte_len").get<std::uint64_t>();
    if (payload_start + off + len > raw.size()) {
      throw IoError("array '" + a.name + "' reaches past end of " +
                    path.string());
    }
    const std::size_t expected = static_cast<std::size_t>(a.element_count()) *
                                 dtype_size(a.dtype);
    if (len != expected) {
      throw ValidationError("array '" + a.name + "' length " +
                            std::to_string(len) + " does not match shape");
    }
    a.bytes.assign(raw.begin() + static_cast<std::ptrdiff_t>(payload_start + off),
                   raw.begin() + static_cast<std::ptrdiff_t>(payload_start + off + len));
    c.arrays.push_back(std::move(a));
  }
  return c;
}

}  // namespace signseg
