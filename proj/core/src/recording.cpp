#include "eegclf/recording.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "eegclf/errors.hpp"

namespace eegclf {

bool ChannelLayout::has(const std::string& name) const {
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::size_t ChannelLayout::index_of(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
        throw UnknownChannel("unknown channel: " + name);
    }
    return static_cast<std::size_t>(it - names.begin());
}

void ChannelLayout::validate() const {
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (name.empty()) {
            throw Error("channel layout contains an empty name");
        }
        if (!seen.insert(name).second) {
            throw Error("duplicate channel name: " + name);
        }
    }
}

const std::map<std::string, std::vector<std::string>>& label_vocabularies() {
    static const std::map<std::string, std::vector<std::string>> vocab = {
        {"audio_type", {"M", "V"}},
        {"genre", {"BA", "CL", "ME", "RE"}},
        {"taste", {"L", "B", "NL"}},
        {"language", {"SP", "EN", "IT", "GE", "KO"}},
        {"known", {"K", "F", "NK"}},
    };
    return vocab;
}

void LabelSpan::validate() const {
    if (!(start_s >= 0.0) || !(start_s < end_s)) {
        throw Error("label span must satisfy 0 <= start_s < end_s");
    }
    const auto& vocab = label_vocabularies();
    for (const auto& [kind, value] : labels) {
        const auto it = vocab.find(kind);
        if (it == vocab.end()) {
            throw Error("unknown label kind: " + kind);
        }
        const auto& allowed = it->second;
        if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
            throw Error("label value '" + value + "' not in the " + kind + " vocabulary");
        }
    }
}

double Recording::duration_s() const {
    return sample_rate_hz > 0.0 ? static_cast<double>(sample_count()) / sample_rate_hz : 0.0;
}

void Recording::validate() const {
    layout.validate();
    if (static_cast<std::size_t>(samples.rows()) != layout.count()) {
        throw ChannelMismatch("sample matrix has " + std::to_string(samples.rows()) +
                              " rows but layout names " + std::to_string(layout.count()) +
                              " channels");
    }
    if (samples.cols() < 1) {
        throw Error("recording holds no samples");
    }
    if (!(sample_rate_hz > 0.0)) {
        throw Error("sample rate must be positive");
    }
    for (const auto& span : spans) {
        span.validate();
        // Half a sample of slack: span bounds in seconds are rounded to
        // sample indices downstream.
        if (span.end_s > duration_s() + 0.5 / sample_rate_hz) {
            throw Error("label span ends past the end of the recording");
        }
    }
}

Recording exclude_channels(const Recording& r, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        if (!r.layout.has(name)) {
            throw UnknownChannel("unknown channel: " + name);
        }
    }

    std::vector<std::size_t> keep;
    keep.reserve(r.layout.count());
    for (std::size_t i = 0; i < r.layout.count(); ++i) {
        const auto& name = r.layout.names[i];
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            keep.push_back(i);
        }
    }

    Recording out;
    out.sample_rate_hz = r.sample_rate_hz;
    out.subject_id = r.subject_id;
    out.spans = r.spans;
    out.layout.names.reserve(keep.size());
    out.samples.resize(static_cast<Eigen::Index>(keep.size()), r.samples.cols());
    for (std::size_t row = 0; row < keep.size(); ++row) {
        out.layout.names.push_back(r.layout.names[keep[row]]);
        out.samples.row(static_cast<Eigen::Index>(row)) =
            r.samples.row(static_cast<Eigen::Index>(keep[row]));
    }
    return out;
}

const std::vector<std::string>& standard_64_channel_names() {
    static const std::vector<std::string> names = {
        "Fp1", "Fz",  "F3",  "F7",  "FT9", "FC5", "FC1", "C3",  "T7",  "TP9", "CP5",
        "CP1", "Pz",  "P3",  "P7",  "O1",  "Oz",  "O2",  "P4",  "P8",  "TP10", "CP6",
        "CP2", "Cz",  "C4",  "T8",  "FT10", "FC6", "FC2", "F4",  "F8",  "Fp2", "AF7",
        "AF3", "AFz", "F1",  "F5",  "FT7", "FC3", "C1",  "C5",  "TP7", "CP3", "P1",
        "P5",  "PO7", "PO3", "POz", "PO4", "PO8", "P6",  "P2",  "CPz", "CP4", "TP8",
        "C6",  "C2",  "FC4", "FT8", "F6",  "AF8", "AF4", "F2",  "FCz",
    };
    return names;
}

const std::vector<std::string>& default_excluded_channels() {
    static const std::vector<std::string> names = {"FCz", "FT9", "FT10"};
    return names;
}

}  // namespace eegclf
