#include "eegclf/experiment.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "eegclf/bilstm.hpp"
#include "eegclf/errors.hpp"
#include "eegclf/feature_archive.hpp"
#include "eegclf/manifest.hpp"
#include "eegclf/segmentation.hpp"

namespace eegclf {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.contains(key)) {
            throw ConfigError("unknown config key '" + key + "' in " + where);
        }
    }
}

// Exclusive lock on an experiment directory; released on destruction. Uses
// O_EXCL so two concurrent invocations cannot both win.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& dir) : path_(dir / ".lock") {
        const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd < 0) {
            throw Error("experiment directory is locked (remove " + path_.string() +
                        " if no other run is active)");
        }
        ::close(fd);
    }
    ~DirLock() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path path_;
};

std::string hex16(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (const unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot hash missing file: " + path.string());
    }
    std::uint64_t h = seed;
    std::vector<unsigned char> buf(1 << 16);
    while (is) {
        is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        const auto n = static_cast<std::size_t>(is.gcount());
        h = fnv1a64(std::span<const unsigned char>(buf.data(), n), h);
    }
    return h;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ConfigError("cannot open experiment config: " + path.string());
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_string(buf.str(), path.parent_path());
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text,
                                                    const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("experiment config is not valid JSON: " + std::string(e.what()));
    }

    reject_unknown_keys(doc,
                        {"schema_version", "trial_ms", "overlap", "feature_kind", "sequence_axis",
                         "label_kind", "exclude_channels", "train", "train_frac", "eval_runs",
                         "io"},
                        "config root");
    if (!doc.contains("schema_version") || doc.at("schema_version").get<int>() != 1) {
        throw ConfigError("config field 'schema_version' must be present and equal to 1");
    }

    ExperimentConfig cfg;
    if (doc.contains("trial_ms")) cfg.trial_ms = doc.at("trial_ms").get<double>();
    if (doc.contains("overlap")) cfg.overlap = doc.at("overlap").get<double>();
    if (doc.contains("feature_kind")) {
        const auto kind = doc.at("feature_kind").get<std::string>();
        if (kind == "plain") {
            cfg.feature_kind = MatrixKind::Plain;
        } else if (kind == "derivative" || kind == "deriv") {
            cfg.feature_kind = MatrixKind::Derivative;
        } else {
            throw ConfigError("config field 'feature_kind' must be plain or derivative");
        }
    }
    if (doc.contains("sequence_axis")) {
        const auto axis = doc.at("sequence_axis").get<std::string>();
        if (axis == "rows") {
            cfg.sequence_axis = SequenceAxis::Rows;
        } else if (axis == "cols") {
            cfg.sequence_axis = SequenceAxis::Cols;
        } else {
            throw ConfigError("config field 'sequence_axis' must be rows or cols");
        }
    }
    if (doc.contains("label_kind")) {
        cfg.label_kind = parse_label_kind(doc.at("label_kind").get<std::string>());
    }
    if (doc.contains("exclude_channels")) {
        cfg.exclude_channels = doc.at("exclude_channels").get<std::vector<std::string>>();
    }

    if (doc.contains("train")) {
        const auto& t = doc.at("train");
        reject_unknown_keys(t,
                            {"epochs", "learning_rate", "batch_size", "seed", "hidden",
                             "adam_beta1", "adam_beta2", "adam_eps"},
                            "config 'train'");
        if (t.contains("epochs")) cfg.eval.epochs = t.at("epochs").get<std::size_t>();
        if (t.contains("learning_rate")) cfg.eval.learning_rate = t.at("learning_rate").get<double>();
        if (t.contains("batch_size")) cfg.eval.batch_size = t.at("batch_size").get<std::size_t>();
        if (t.contains("seed")) cfg.eval.base_seed = t.at("seed").get<std::uint64_t>();
        if (t.contains("hidden")) cfg.eval.hidden = t.at("hidden").get<Eigen::Index>();
        if (t.contains("adam_beta1")) cfg.eval.adam_beta1 = t.at("adam_beta1").get<double>();
        if (t.contains("adam_beta2")) cfg.eval.adam_beta2 = t.at("adam_beta2").get<double>();
        if (t.contains("adam_eps")) cfg.eval.adam_eps = t.at("adam_eps").get<double>();
    }
    if (doc.contains("train_frac")) cfg.eval.train_frac = doc.at("train_frac").get<double>();
    if (doc.contains("eval_runs")) cfg.eval.n_runs = doc.at("eval_runs").get<std::size_t>();

    if (!doc.contains("io")) {
        throw ConfigError("config field 'io' is required");
    }
    const auto& io = doc.at("io");
    reject_unknown_keys(io, {"manifest", "out_dir"}, "config 'io'");
    if (!io.contains("manifest") || !io.contains("out_dir")) {
        throw ConfigError("config 'io' needs 'manifest' and 'out_dir'");
    }
    cfg.manifest = io.at("manifest").get<std::string>();
    cfg.out_dir = io.at("out_dir").get<std::string>();
    if (cfg.manifest.is_relative()) cfg.manifest = base_dir / cfg.manifest;
    if (cfg.out_dir.is_relative()) cfg.out_dir = base_dir / cfg.out_dir;

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    if (!(trial_ms > 0.0)) {
        throw ConfigError("config field 'trial_ms' must be positive");
    }
    if (!(overlap >= 0.0) || overlap >= 1.0) {
        // Overlap 1.0 (or more) means the window never advances.
        throw ZeroHop("config field 'overlap' must lie in [0, 1)");
    }
    if (!(eval.train_frac > 0.0) || !(eval.train_frac < 1.0)) {
        throw ConfigError("config field 'train_frac' must lie in (0, 1)");
    }
    if (eval.n_runs < 1) {
        throw ConfigError("config field 'eval_runs' must be >= 1");
    }
    if (eval.hidden < 1) {
        throw ConfigError("config field 'train.hidden' must be >= 1");
    }
    if (eval.epochs < 1 || eval.batch_size < 1) {
        throw ConfigError("config fields 'train.epochs' and 'train.batch_size' must be >= 1");
    }
    if (!(eval.learning_rate >= 0.0)) {
        throw ConfigError("config field 'train.learning_rate' must be >= 0");
    }
}

PipelineConfig ExperimentConfig::pipeline_config() const {
    PipelineConfig p;
    p.trial_len_s = trial_ms / 1000.0;
    p.overlap_frac = overlap;
    p.feature_kind = feature_kind;
    p.axis = sequence_axis;
    p.exclude_channels = exclude_channels;
    return p;
}

std::string ExperimentConfig::canonical_json() const {
    // Plain (alphabetically ordered) json, so identical configs always
    // serialize to identical bytes.
    json doc;
    doc["schema_version"] = 1;
    doc["trial_ms"] = trial_ms;
    doc["overlap"] = overlap;
    doc["feature_kind"] = feature_kind == MatrixKind::Plain ? "plain" : "derivative";
    doc["sequence_axis"] = sequence_axis == SequenceAxis::Rows ? "rows" : "cols";
    doc["label_kind"] = label_kind_name(label_kind);
    doc["exclude_channels"] = exclude_channels;
    doc["train"] = {{"epochs", eval.epochs},
                    {"learning_rate", eval.learning_rate},
                    {"batch_size", eval.batch_size},
                    {"seed", eval.base_seed},
                    {"hidden", eval.hidden},
                    {"adam_beta1", eval.adam_beta1},
                    {"adam_beta2", eval.adam_beta2},
                    {"adam_eps", eval.adam_eps}};
    doc["train_frac"] = eval.train_frac;
    doc["eval_runs"] = eval.n_runs;
    doc["io"] = {{"manifest", manifest.string()}, {"out_dir", out_dir.string()}};
    return doc.dump();
}

namespace {

// Cache key: the stage config plus every input byte the stage reads.
std::uint64_t feature_stage_hash(const ExperimentConfig& cfg) {
    json stage;
    stage["trial_ms"] = cfg.trial_ms;
    stage["overlap"] = cfg.overlap;
    stage["feature_kind"] = cfg.feature_kind == MatrixKind::Plain ? "plain" : "derivative";
    stage["sequence_axis"] = cfg.sequence_axis == SequenceAxis::Rows ? "rows" : "cols";
    stage["label_kind"] = label_kind_name(cfg.label_kind);
    stage["exclude_channels"] = cfg.exclude_channels;
    const std::string text = stage.dump();

    std::uint64_t h = fnv1a64(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(text.data()), text.size()));
    h = fnv1a64_file(cfg.manifest, h);
    const auto entries = load_manifest(cfg.manifest);
    const auto dir = cfg.manifest.parent_path();
    for (const auto& e : entries) {
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = dir / p;
        h = fnv1a64_file(p, h);
    }
    return h;
}

}  // namespace

EvalReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    DirLock lock(cfg.out_dir);

    // Feature stage, cached on a content hash of inputs and stage config.
    const auto cache_dir = cfg.out_dir / "cache";
    std::filesystem::create_directories(cache_dir);
    const auto features_path =
        cache_dir / ("features_" + hex16(feature_stage_hash(cfg)) + ".eegf");

    Dataset dataset;
    if (std::filesystem::exists(features_path)) {
        dataset = load_feature_archive(features_path).dataset;
    } else {
        dataset = build_dataset(cfg.manifest, cfg.label_kind, cfg.pipeline_config());
        save_feature_archive(features_path, dataset, cfg.feature_kind);
    }

    EvalReport report = repeated_eval(dataset, cfg.eval);
    report.config_echo_json = cfg.canonical_json();

    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        save_checkpoint(cfg.out_dir / ("run_" + std::to_string(i) + ".ckpt"),
                        report.runs[i].model);
    }
    std::ofstream os(cfg.out_dir / "report.json", std::ios::trunc | std::ios::binary);
    if (!os) {
        throw Error("cannot write report.json under " + cfg.out_dir.string());
    }
    os << report.to_json_string();
    return report;
}

}  // namespace eegclf
