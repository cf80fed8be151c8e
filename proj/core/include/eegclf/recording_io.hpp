#pragma once

#include <filesystem>

#include "eegclf/recording.hpp"

namespace eegclf {

// On-disk recording format (.eegr), all integers little-endian:
//
//   offset  size  field
//   0       4     magic "EEGR"
//   4       2     u16 format version (currently 1)
//   6       8     f64 sample_rate_hz
//   14      2     u16 channel_count
//   16      8     u64 sample_count
//   24      ...   channel_count names, each u16 byte length + UTF-8 bytes
//   ...     ...   payload: channel_count * sample_count f32, channel-major
//
// Samples are stored as 32-bit floats (sufficient for EEG dynamic range at
// half the size); in-memory processing stays 64-bit. Subject id and label
// spans travel in the sidecar manifest, not in this file.

inline constexpr char kRecordingMagic[4] = {'E', 'E', 'G', 'R'};
inline constexpr std::uint16_t kRecordingFormatVersion = 1;

// Writes sample_rate_hz, layout and samples. Throws ChannelMismatch if the
// layout and the sample matrix disagree.
void write_recording(const std::filesystem::path& path, const Recording& r);

// Loads a recording; subject_id and spans are left empty (see manifest.hpp).
// Throws BadMagic, TruncatedPayload, ChannelMismatch, or Error.
Recording load_recording(const std::filesystem::path& path);

}  // namespace eegclf
