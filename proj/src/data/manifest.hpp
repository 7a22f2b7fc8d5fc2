#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "data/sample.hpp"

namespace signseg {

enum class Split { kTrain, kDev, kTest };

const char* split_name(Split s);
Split split_from_name(const std::string& name);

struct ManifestEntry {
  std::string sample_id;
  std::string path;  // relative to the manifest file
  Split split = Split::kTrain;
  std::int64_t frames = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> split_entries(Split s) const;
};

// Validates id uniqueness and (on load) that every referenced file exists.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const Manifest& m);

// Loads every sample of a split, resolving paths against the manifest dir.
std::vector<Sample> load_split(const std::filesystem::path& manifest_path,
                               const Manifest& m, Split split);

}  // namespace signseg
