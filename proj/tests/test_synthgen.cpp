#include <doctest.h>

#include <fstream>

#include "eegclf/dataset.hpp"
#include "eegclf/errors.hpp"
#include "eegclf/manifest.hpp"
#include "eegclf/synthgen.hpp"
#include "testutil.hpp"

using namespace eegclf;

namespace {

SynthConfig two_class_config(double snr_db = std::numeric_limits<double>::infinity()) {
    SynthConfig cfg;
    cfg.channel_names = {"c0", "c1", "c2", "c3"};
    cfg.spans_per_class = 2;
    cfg.span_s = 4.0;
    cfg.sample_rate_hz = 500.0;
    cfg.seed = 99;
    ClassProfile m;
    m.name = "M";
    m.channel_gains = {1.0, 10.0, 1.0, 1.0};
    m.band_low_hz = 5.0;
    m.band_high_hz = 40.0;
    m.snr_db = snr_db;
    ClassProfile v = m;
    v.name = "V";
    v.channel_gains = {1.0, 1.0, 10.0, 1.0};
    cfg.profiles = {m, v};
    return cfg;
}

}  // namespace

TEST_CASE("a 10x gain pair shows up as a 20 dB difference in every trial") {
    const SynthConfig cfg = two_class_config();
    const SynthOutput out = generate(cfg);
    REQUIRE(out.recordings.size() == 2);

    Fft fft;
    for (const auto& span : out.recordings[0].spans) {
        const auto trials = segment(out.recordings[0], span, 0.4, 0.5);
        for (const auto& t : trials) {
            const EnergyDiffMatrix e = energy_diff_matrix(energy_vector(t, fft));
            // gains 1 vs 10 -> energy ratio 100 -> 20 dB, channel 1 over 0.
            CHECK(e.m(1, 0) == doctest::Approx(20.0).epsilon(0.5 / 20.0));
        }
    }
}

TEST_CASE("distinct profiles separate class-conditional matrix means") {
    const SynthConfig cfg = two_class_config(20.0);
    const SynthOutput out = generate(cfg);

    Fft fft;
    const auto mean_entry = [&](const Recording& rec, Eigen::Index i, Eigen::Index j) {
        double acc = 0.0;
        std::size_t n = 0;
        for (const auto& span : rec.spans) {
            for (const auto& t : segment(rec, span, 0.4, 0.5)) {
                acc += energy_diff_matrix(energy_vector(t, fft)).m(i, j);
                ++n;
            }
        }
        return acc / static_cast<double>(n);
    };
    // Channel 1 is hot for class M, channel 2 for class V; the (1,2) entry
    // separates the classes by roughly twice the 20 dB gain contrast.
    const double m_mean = mean_entry(out.recordings[0], 1, 2);
    const double v_mean = mean_entry(out.recordings[1], 1, 2);
    CHECK(m_mean - v_mean > 20.0);
}

TEST_CASE("generation is deterministic in the seed") {
    const SynthConfig cfg = two_class_config(10.0);
    const SynthOutput a = generate(cfg);
    const SynthOutput b = generate(cfg);
    REQUIRE(a.recordings.size() == b.recordings.size());
    for (std::size_t i = 0; i < a.recordings.size(); ++i) {
        CHECK(a.recordings[i].samples == b.recordings[i].samples);
    }

    SynthConfig other = cfg;
    other.seed = 100;
    CHECK(generate(other).recordings[0].samples != a.recordings[0].samples);
}

TEST_CASE("generated recordings are valid and round-trip the file format") {
    testutil::TempDir dir("synth");
    const SynthConfig cfg = two_class_config(6.0);
    const auto manifest_path = write_synth_dataset(dir.path(), cfg);

    const SynthOutput expected = generate(cfg);
    const auto entries = load_manifest(manifest_path);
    REQUIRE(entries.size() == 2);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const Recording back = load_recording_entry(dir.path(), entries[i]);
        back.validate();
        CHECK(back.samples == expected.recordings[i].samples);
        CHECK(back.spans.size() == cfg.spans_per_class);
        CHECK(back.spans[0].labels.at("audio_type") == expected.entries[i].spans[0].labels.at("audio_type"));
    }
}

TEST_CASE("band edges outside (0, rate/2) raise BadBand") {
    SynthConfig cfg = two_class_config();
    cfg.profiles[0].band_high_hz = 300.0;  // rate/2 is 250
    CHECK_THROWS_AS(cfg.validate(), BadBand);
    cfg.profiles[0].band_high_hz = 40.0;
    cfg.profiles[0].band_low_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), BadBand);
}

TEST_CASE("profile gain count must match the channel count") {
    SynthConfig cfg = two_class_config();
    cfg.profiles[0].channel_gains.pop_back();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("profiles JSON loads with defaults") {
    testutil::TempDir dir("profiles");
    const auto p = dir.path() / "profiles.json";
    std::ofstream(p) << R"({
        "label_kind": "genre",
        "channel_names": ["a", "b"],
        "profiles": [
            {"name": "BA", "channel_gains": [1, 2], "band_hz": [4, 30]},
            {"name": "CL", "channel_gains": [2, 1], "band_hz": [4, 30], "snr_db": 12}
        ]
    })";
    const SynthConfig cfg = load_synth_config(p);
    CHECK(cfg.label_key == "genre");
    REQUIRE(cfg.profiles.size() == 2);
    CHECK(std::isinf(cfg.profiles[0].snr_db));
    CHECK(cfg.profiles[1].snr_db == 12.0);
    CHECK(cfg.channel_names.size() == 2);
}

TEST_CASE("omitted channel names default to the 61-channel montage") {
    SynthConfig cfg = two_class_config();
    cfg.channel_names.clear();
    cfg.profiles[0].channel_gains.assign(61, 1.0);
    cfg.profiles[1].channel_gains.assign(61, 1.0);
    cfg.spans_per_class = 1;
    cfg.span_s = 1.0;
    const SynthOutput out = generate(cfg);
    CHECK(out.recordings[0].channel_count() == 61);
    CHECK_FALSE(out.recordings[0].layout.has("FCz"));
}
