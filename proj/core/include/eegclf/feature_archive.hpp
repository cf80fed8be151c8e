#pragma once

#include <filesystem>

#include "eegclf/dataset.hpp"

namespace eegclf {

// Feature archive (.eegf), all integers little-endian:
//
//   magic "EEGF", u16 version, u8 kind (0 plain, 1 derivative), u16 C,
//   u64 sequence count, u16 class count, class names (u16 length + UTF-8),
//   then per sequence: u32 label id + C*C f64 row-major.
inline constexpr char kFeatureArchiveMagic[4] = {'E', 'E', 'G', 'F'};
inline constexpr std::uint16_t kFeatureArchiveVersion = 1;

void save_feature_archive(const std::filesystem::path& path, const Dataset& ds, MatrixKind kind);

struct FeatureArchive {
    Dataset dataset;
    MatrixKind kind = MatrixKind::Plain;
};

FeatureArchive load_feature_archive(const std::filesystem::path& path);

}  // namespace eegclf
