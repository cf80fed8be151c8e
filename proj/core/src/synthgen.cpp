#include "eegclf/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "eegclf/errors.hpp"
#include "eegclf/recording_io.hpp"
#include "eegclf/rng.hpp"

namespace eegclf {

void SynthConfig::validate() const {
    if (profiles.size() < 2) {
        throw ConfigError("synthetic generation needs at least 2 class profiles");
    }
    if (!(sample_rate_hz > 0.0) || !(span_s > 0.0) || spans_per_class < 1 ||
        sinusoids_per_span < 1 || !(carrier_rms_uv > 0.0)) {
        throw ConfigError("synthetic generation config has a non-positive field");
    }
    const std::size_t channels = channel_names.size();
    if (channels < 2) {
        throw ConfigError("synthetic generation needs at least 2 channels");
    }
    for (const auto& p : profiles) {
        if (!(p.band_low_hz > 0.0) || !(p.band_low_hz < p.band_high_hz) ||
            !(p.band_high_hz < sample_rate_hz / 2.0)) {
            throw BadBand("profile '" + p.name + "' band must satisfy 0 < low < high < rate/2");
        }
        if (p.channel_gains.size() != channels) {
            throw ConfigError("profile '" + p.name + "' needs one gain per channel");
        }
        for (const double g : p.channel_gains) {
            if (!(g > 0.0)) {
                throw ConfigError("profile '" + p.name + "' has a non-positive channel gain");
            }
        }
    }
}

namespace {

// All channels of a span share one carrier, a sum of sinusoids drawn inside
// the profile's band, normalized to unit RMS. Because the carrier is shared,
// inter-channel energy ratios equal the gain ratios exactly, independent of
// where inside the band the frequencies landed.
std::vector<double> span_carrier(const ClassProfile& profile, std::size_t span_len,
                                 double sample_rate_hz, std::size_t sinusoids, Rng& rng) {
    std::vector<double> freqs(sinusoids);
    std::vector<double> phases(sinusoids);
    for (std::size_t s = 0; s < sinusoids; ++s) {
        freqs[s] = rng.uniform(profile.band_low_hz, profile.band_high_hz);
        phases[s] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }

    std::vector<double> carrier(span_len, 0.0);
    for (std::size_t s = 0; s < sinusoids; ++s) {
        const double w = 2.0 * std::numbers::pi * freqs[s] / sample_rate_hz;
        for (std::size_t t = 0; t < span_len; ++t) {
            carrier[t] += std::sin(w * static_cast<double>(t) + phases[s]);
        }
    }

    double sum_sq = 0.0;
    for (const double v : carrier) {
        sum_sq += v * v;
    }
    const double rms = std::sqrt(sum_sq / static_cast<double>(span_len));
    if (rms > 0.0) {
        for (double& v : carrier) {
            v /= rms;
        }
    }
    return carrier;
}

double f32_quantize(double v) {
    return static_cast<double>(static_cast<float>(v));
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
    SynthConfig c = cfg;
    if (c.channel_names.empty()) {
        c.channel_names = standard_64_channel_names();
        for (const auto& name : default_excluded_channels()) {
            c.channel_names.erase(
                std::find(c.channel_names.begin(), c.channel_names.end(), name));
        }
    }
    c.validate();

    const auto span_len = static_cast<std::size_t>(std::llround(c.span_s * c.sample_rate_hz));
    const std::size_t channels = c.channel_names.size();
    const Rng root(c.seed);

    SynthOutput out;
    for (std::size_t p = 0; p < c.profiles.size(); ++p) {
        const ClassProfile& profile = c.profiles[p];

        Recording rec;
        rec.sample_rate_hz = c.sample_rate_hz;
        rec.layout.names = c.channel_names;
        rec.subject_id = "synth";
        rec.samples.setZero(static_cast<Eigen::Index>(channels),
                            static_cast<Eigen::Index>(span_len * c.spans_per_class));

        for (std::size_t s = 0; s < c.spans_per_class; ++s) {
            // Per-span substream keyed by (profile, span), so span content
            // does not depend on generation order.
            Rng rng = root.substream(p * c.spans_per_class + s);
            const auto carrier =
                span_carrier(profile, span_len, c.sample_rate_hz, c.sinusoids_per_span, rng);

            const std::size_t offset = s * span_len;
            for (std::size_t m = 0; m < channels; ++m) {
                const double amplitude = profile.channel_gains[m] * c.carrier_rms_uv;
                double noise_sigma = 0.0;
                if (std::isfinite(profile.snr_db)) {
                    // Per-channel SNR: noise power = signal power / 10^(snr/10).
                    noise_sigma = amplitude / std::pow(10.0, profile.snr_db / 20.0);
                }
                for (std::size_t t = 0; t < span_len; ++t) {
                    double v = amplitude * carrier[t];
                    if (noise_sigma > 0.0) {
                        v += noise_sigma * rng.normal();
                    }
                    // f32 grid so the recording round-trips the file format
                    // bit-exactly.
                    rec.samples(static_cast<Eigen::Index>(m),
                                static_cast<Eigen::Index>(offset + t)) = f32_quantize(v);
                }
            }

            LabelSpan span;
            span.start_s = static_cast<double>(offset) / c.sample_rate_hz;
            span.end_s = static_cast<double>(offset + span_len) / c.sample_rate_hz;
            span.labels[c.label_key] = profile.name;
            rec.spans.push_back(span);
        }
        rec.validate();

        ManifestEntry entry;
        entry.path = "synth_" + profile.name + ".eegr";
        entry.subject = rec.subject_id;
        entry.spans = rec.spans;
        out.entries.push_back(std::move(entry));
        out.recordings.push_back(std::move(rec));
    }
    return out;
}

std::filesystem::path write_synth_dataset(const std::filesystem::path& out_dir,
                                          const SynthConfig& cfg) {
    std::filesystem::create_directories(out_dir);
    SynthOutput out = generate(cfg);
    for (std::size_t i = 0; i < out.recordings.size(); ++i) {
        write_recording(out_dir / out.entries[i].path, out.recordings[i]);
    }
    const auto manifest_path = out_dir / "manifest.json";
    save_manifest(manifest_path, out.entries);
    return manifest_path;
}

SynthConfig load_synth_config(const std::filesystem::path& profiles_json) {
    std::ifstream is(profiles_json);
    if (!is) {
        throw Error("cannot open profiles file: " + profiles_json.string());
    }
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("profiles file is not valid JSON: " + std::string(e.what()));
    }

    SynthConfig cfg;
    if (doc.contains("label_kind")) {
        cfg.label_key = doc.at("label_kind").get<std::string>();
    }
    if (doc.contains("channel_names")) {
        cfg.channel_names = doc.at("channel_names").get<std::vector<std::string>>();
    }
    if (!doc.contains("profiles") || !doc.at("profiles").is_array()) {
        throw ConfigError("profiles file needs a \"profiles\" array");
    }
    for (const auto& j : doc.at("profiles")) {
        ClassProfile p;
        p.name = j.at("name").get<std::string>();
        p.channel_gains = j.at("channel_gains").get<std::vector<double>>();
        const auto& band = j.at("band_hz");
        if (!band.is_array() || band.size() != 2) {
            throw ConfigError("profile band_hz must be [low, high]");
        }
        p.band_low_hz = band.at(0).get<double>();
        p.band_high_hz = band.at(1).get<double>();
        if (j.contains("snr_db")) {
            p.snr_db = j.at("snr_db").get<double>();
        }
        cfg.profiles.push_back(std::move(p));
    }
    return cfg;
}

}  // namespace eegclf
