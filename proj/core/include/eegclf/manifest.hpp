#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "eegclf/recording.hpp"

namespace eegclf {

// One dataset entry: where the signal lives plus the metadata the .eegr file
// does not carry. Paths are resolved relative to the manifest's directory.
struct ManifestEntry {
    std::string path;
    std::string subject;
    std::vector<LabelSpan> spans;
};

// Manifest file: a JSON array of objects with keys
//   "path", "subject", "spans" [{"start_s", "end_s", "labels"}, ...]
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Loads the entry's .eegr file and attaches subject and spans, then validates
// the assembled Recording (spans must fit inside the signal).
Recording load_recording_entry(const std::filesystem::path& manifest_dir, const ManifestEntry& entry);

}  // namespace eegclf
