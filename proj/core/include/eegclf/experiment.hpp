#pragma once

#include <filesystem>
#include <string>

#include "eegclf/dataset.hpp"
#include "eegclf/evaluation.hpp"

namespace eegclf {

// Declarative experiment: one JSON file drives segment -> featurize -> split
// -> train -> eval -> report. Unknown keys are rejected so a typo in an
// experiment axis cannot silently fall back to a default.
struct ExperimentConfig {
    double trial_ms = 400.0;
    double overlap = 0.5;
    MatrixKind feature_kind = MatrixKind::Plain;
    SequenceAxis sequence_axis = SequenceAxis::Rows;
    LabelKind label_kind = LabelKind::AudioType;
    std::vector<std::string> exclude_channels;
    EvalProtocolConfig eval;
    std::filesystem::path manifest;
    std::filesystem::path out_dir;

    // Parses and validates; file paths are resolved relative to the config
    // file's directory. Throws ConfigError naming the offending field.
    static ExperimentConfig from_json_file(const std::filesystem::path& path);
    static ExperimentConfig from_json_string(const std::string& text,
                                             const std::filesystem::path& base_dir);

    // Fail-fast checks that need no data: ranges, overlap < 1 (ZeroHop), ...
    void validate() const;

    PipelineConfig pipeline_config() const;

    // Canonical, key-sorted JSON echo; identical configs serialize to
    // identical bytes. Embedded in reports and used for stage cache keys.
    std::string canonical_json() const;
};

// Runs the experiment. Artifacts land under cfg.out_dir:
//   cache/features_<hash>.eegf   featurized dataset, keyed by a content hash
//                                of (manifest bytes, recording bytes, stage
//                                config); reruns with unchanged inputs reuse it
//   run_<i>.ckpt                 trained model of each evaluation run
//   report.json                  the EvalReport
// A lock file guards out_dir against concurrent invocations. The report is a
// pure function of (config, input data): equal runs produce byte-equal files.
EvalReport run_experiment(const ExperimentConfig& cfg);

// FNV-1a 64-bit, used for stage cache keys.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t fnv1a64_file(const std::filesystem::path& path, std::uint64_t seed = 0xcbf29ce484222325ull);

}  // namespace eegclf
