#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "eegclf/manifest.hpp"
#include "eegclf/recording.hpp"

namespace eegclf {

// One synthetic class: channel m carries channel_gains[m] times a shared
// band-limited carrier, plus white noise at snr_db per channel. Distinct gain
// patterns give classes distinct inter-channel energy signatures.
struct ClassProfile {
    std::string name;                   // class label value, e.g. "M"
    std::vector<double> channel_gains;  // one positive gain per channel
    double band_low_hz = 0.0;
    double band_high_hz = 0.0;
    double snr_db = std::numeric_limits<double>::infinity();  // +inf: no noise
};

struct SynthConfig {
    std::vector<ClassProfile> profiles;
    std::string label_key = "audio_type";  // manifest label kind to write
    std::vector<std::string> channel_names;
    std::size_t spans_per_class = 1;
    double span_s = 30.0;
    double sample_rate_hz = 2500.0;
    std::uint64_t seed = 0;
    std::size_t sinusoids_per_span = 8;
    double carrier_rms_uv = 20.0;  // unit-gain channel RMS; keeps values EEG-like

    void validate() const;  // throws BadBand and friends
};

// One recording per profile, spans_per_class consecutive labeled spans each.
// Every span draws its own carrier (frequencies and phases) from a per-span
// substream, so generation order does not matter. Samples are quantized to
// f32 precision so generated data round-trips the file format bit-exactly.
struct SynthOutput {
    std::vector<Recording> recordings;
    std::vector<ManifestEntry> entries;  // paths filled with synth_<name>.eegr
};

SynthOutput generate(const SynthConfig& cfg);

// generate + write .eegr files and manifest.json under out_dir; returns the
// manifest path.
std::filesystem::path write_synth_dataset(const std::filesystem::path& out_dir,
                                          const SynthConfig& cfg);

// Profiles file: {"label_kind": ..., "channel_names": [...]? , "profiles":
// [{"name", "channel_gains", "band_hz": [lo, hi], "snr_db"?}, ...]}. Omitted
// snr_db means noise-free; omitted channel_names means the standard 64-cap
// montage minus {FCz, FT9, FT10}.
SynthConfig load_synth_config(const std::filesystem::path& profiles_json);

}  // namespace eegclf
