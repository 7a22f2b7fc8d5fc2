#include "data/manifest.hpp"

#include <set>

#include "util/strict_json.hpp"

namespace signseg {

using nlohmann::json;

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_name(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split '" + name +
                        "' (expected train, dev or test)");
}

std::vector<ManifestEntry> Manifest::split_entries(Split s) const {
  std::vector<ManifestEntry> out;
  for (const ManifestEntry& e : entries) {
    if (e.split == s) out.push_back(e);
  }
  return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("manifest not found: " + path.string());
  }
  const json j = jsonutil::load_json_file(path.string());
  if (!j.contains("entries") || !j.at("entries").is_array()) {
    throw ValidationError("manifest " + path.string() +
                          ": missing 'entries' array");
  }
  Manifest m;
  std::set<std::string> seen;
  for (const auto& item : j.at("entries")) {
    ManifestEntry e;
    e.sample_id = item.at("sample_id").get<std::string>();
    e.path = item.at("path").get<std::string>();
    e.split = split_from_name(item.at("split").get<std::string>());
    e.frames = item.at("frames").get<std::int64_t>();
    if (!seen.insert(e.sample_id).second) {
      throw ValidationError("manifest: duplicate sample_id '" + e.sample_id +
                            "'");
    }
    const auto resolved = path.parent_path() / e.path;
    if (!std::filesystem::exists(resolved)) {
      throw ValidationError("manifest: file does not exist: " +
                            resolved.string());
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  json entries = json::array();
  for (const ManifestEntry& e : m.entries) {
    entries.push_back({{"sample_id", e.sample_id},
                       {"path", e.path},
                       {"split", split_name(e.split)},
                       {"frames", e.frames}});
  }
  json j = {{"entries", std::move(entries)}};
  jsonutil::write_text_file(path.string(), j.dump(2) + "\n");
}

std::vector<Sample> load_split(const std::filesystem::path& manifest_path,
                               const Manifest& m, Split split) {
  std::vector<Sample> out;
  for (const ManifestEntry& e : m.split_entries(split)) {
    out.push_back(load_sample(manifest_path.parent_path() / e.path));
  }
  return out;
}

}  // namespace signseg
