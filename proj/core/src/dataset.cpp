#include "eegclf/dataset.hpp"

#include <algorithm>

#include "eegclf/errors.hpp"
#include "eegclf/manifest.hpp"

namespace eegclf {

std::size_t Dataset::class_count(std::size_t cls) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), cls));
}

void Dataset::validate() const {
    if (items.size() != labels.size()) {
        throw LengthMismatch("dataset items and labels differ in length");
    }
    for (const auto l : labels) {
        if (l >= class_vocab.size()) {
            throw IndexOutOfRange("dataset label index out of vocabulary range");
        }
    }
    if (!items.empty()) {
        const Eigen::Index steps = items.front().steps();
        const Eigen::Index dim = items.front().dim();
        for (const auto& item : items) {
            if (item.steps() != steps || item.dim() != dim) {
                throw ShapeMismatch("dataset feature sequences differ in shape");
            }
        }
    }
}

LabelKind parse_label_kind(const std::string& s) {
    if (s == "audio_type") return LabelKind::AudioType;
    if (s == "genre") return LabelKind::Genre;
    if (s == "taste") return LabelKind::Taste;
    if (s == "taste3") return LabelKind::Taste3;
    if (s == "language") return LabelKind::Language;
    throw ConfigError("unknown label kind: " + s);
}

std::string label_kind_name(LabelKind kind) {
    switch (kind) {
        case LabelKind::AudioType: return "audio_type";
        case LabelKind::Genre: return "genre";
        case LabelKind::Taste: return "taste";
        case LabelKind::Taste3: return "taste3";
        case LabelKind::Language: return "language";
    }
    throw ConfigError("invalid label kind");
}

std::string manifest_label_key(LabelKind kind) {
    return kind == LabelKind::Taste3 ? "taste" : label_kind_name(kind);
}

const std::vector<std::string>& canonical_classes(LabelKind kind) {
    static const std::vector<std::string> audio = {"M", "V"};
    static const std::vector<std::string> genre = {"BA", "CL", "ME", "RE"};
    static const std::vector<std::string> taste = {"L", "NL"};
    static const std::vector<std::string> taste3 = {"L", "B", "NL"};
    static const std::vector<std::string> language = {"SP", "EN", "IT", "GE", "KO"};
    switch (kind) {
        case LabelKind::AudioType: return audio;
        case LabelKind::Genre: return genre;
        case LabelKind::Taste: return taste;
        case LabelKind::Taste3: return taste3;
        case LabelKind::Language: return language;
    }
    throw ConfigError("invalid label kind");
}

Dataset build_dataset(const std::vector<Recording>& recordings, LabelKind kind,
                      const PipelineConfig& cfg) {
    const std::string key = manifest_label_key(kind);
    const auto& canonical = canonical_classes(kind);

    // (class value, sequence) in pipeline order; vocabulary indices are
    // assigned afterwards so they follow canonical order, not encounter order.
    std::vector<std::pair<std::string, FeatureSequence>> collected;
    std::vector<bool> present(canonical.size(), false);

    for (const auto& rec : recordings) {
        const Recording working =
            cfg.exclude_channels.empty() ? rec : exclude_channels(rec, cfg.exclude_channels);
        for (const auto& span : working.spans) {
            const auto it = span.labels.find(key);
            if (it == span.labels.end()) {
                throw MissingLabel("a span lacks the '" + key + "' label");
            }
            const auto cls = std::find(canonical.begin(), canonical.end(), it->second);
            if (cls == canonical.end()) {
                // Only possible for the binary taste task, where "B" spans
                // are out of scope; every other value was vocabulary-checked
                // at manifest load.
                continue;
            }
            auto trials = segment(working, span, cfg.trial_len_s, cfg.overlap_frac);
            auto sequences = featurize(trials, cfg.feature_kind, cfg.axis, cfg.threads);
            present[static_cast<std::size_t>(cls - canonical.begin())] = true;
            for (auto& seq : sequences) {
                collected.emplace_back(it->second, std::move(seq));
            }
        }
    }
    if (collected.empty()) {
        throw EmptyDataset("no trials produced from the manifest");
    }

    Dataset ds;
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        if (present[i]) {
            ds.class_vocab.push_back(canonical[i]);
        }
    }
    ds.items.reserve(collected.size());
    ds.labels.reserve(collected.size());
    for (auto& [value, seq] : collected) {
        const auto idx = std::find(ds.class_vocab.begin(), ds.class_vocab.end(), value);
        ds.labels.push_back(static_cast<std::size_t>(idx - ds.class_vocab.begin()));
        ds.items.push_back(std::move(seq));
    }
    ds.validate();
    return ds;
}

Dataset build_dataset(const std::filesystem::path& manifest_path, LabelKind kind,
                      const PipelineConfig& cfg) {
    const auto entries = load_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    std::vector<Recording> recordings;
    recordings.reserve(entries.size());
    for (const auto& e : entries) {
        recordings.push_back(load_recording_entry(dir, e));
    }
    return build_dataset(recordings, kind, cfg);
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
    Dataset out;
    out.class_vocab = ds.class_vocab;
    out.items.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (const auto i : indices) {
        if (i >= ds.size()) {
            throw IndexOutOfRange("subset index out of range");
        }
        out.items.push_back(ds.items[i]);
        out.labels.push_back(ds.labels[i]);
    }
    return out;
}

}  // namespace eegclf
