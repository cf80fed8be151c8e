#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eegclf/features.hpp"

namespace eegclf {

// Featurized, labeled trials ready for training. labels[i] indexes
// class_vocab and pairs with items[i]; every sequence has the same shape.
struct Dataset {
    std::vector<FeatureSequence> items;
    std::vector<std::size_t> labels;
    std::vector<std::string> class_vocab;

    std::size_t size() const { return items.size(); }
    Eigen::Index feature_dim() const { return items.empty() ? 0 : items.front().dim(); }
    std::size_t class_count(std::size_t cls) const;
    void validate() const;
};

// Classification axes. Taste is the binary like/dislike task (spans labeled
// "B" are out of that task and skipped); Taste3 keeps all three answers.
enum class LabelKind { AudioType, Genre, Taste, Taste3, Language };

LabelKind parse_label_kind(const std::string& s);  // "audio_type", ..., "taste3"
std::string label_kind_name(LabelKind kind);
std::string manifest_label_key(LabelKind kind);  // Taste3 -> "taste"

// Canonical class order for each axis (audio_type: M,V; genre: BA,CL,ME,RE;
// taste: L,NL; taste3: L,B,NL; language: SP,EN,IT,GE,KO).
const std::vector<std::string>& canonical_classes(LabelKind kind);

// Everything between raw recordings and feature sequences.
struct PipelineConfig {
    double trial_len_s = 0.4;
    double overlap_frac = 0.5;
    MatrixKind feature_kind = MatrixKind::Plain;
    SequenceAxis axis = SequenceAxis::Rows;
    std::vector<std::string> exclude_channels;  // dropped right after load
    unsigned threads = 0;
};

// Segments and featurizes every labeled span in the manifest. Items keep
// manifest order, then span order, then trial order. class_vocab is the
// canonical order restricted to classes actually present. Throws
// MissingLabel if a span lacks the requested kind, EmptyDataset if nothing
// survives.
Dataset build_dataset(const std::filesystem::path& manifest_path, LabelKind kind,
                      const PipelineConfig& cfg);

// Same, from already-loaded recordings (paths resolved, metadata attached).
Dataset build_dataset(const std::vector<Recording>& recordings, LabelKind kind,
                      const PipelineConfig& cfg);

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

}  // namespace eegclf
