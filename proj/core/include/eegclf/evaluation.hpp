#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eegclf/bilstm.hpp"
#include "eegclf/dataset.hpp"

namespace eegclf {

// K x K count table; rows are the true class, columns the predicted class.
struct ConfusionMatrix {
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
    std::vector<std::string> class_vocab;

    std::int64_t total() const { return counts.sum(); }
    std::int64_t diagonal_total() const { return counts.diagonal().sum(); }
};

ConfusionMatrix confusion(std::span<const std::size_t> truths, std::span<const std::size_t> preds,
                          std::vector<std::string> class_vocab);

// Per-class precision/recall/F. A zero denominator (no predictions, or no
// instances, of the class) yields value 0 with defined == false, so reports
// stay serializable and averages stay well-defined.
struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    bool precision_defined = false;
    bool recall_defined = false;
    bool f_defined = false;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;

    // Binary-task view: metrics of the designated positive class.
    const ClassMetrics& positive(std::size_t positive_class = 0) const;
};

// accuracy = trace/total; recall_c = diag_c / row-sum_c; precision_c =
// diag_c / col-sum_c; F = 2PR/(P+R). Throws EmptyMatrix when total == 0.
MetricsReport metrics(const ConfusionMatrix& cm);

// Index split of a dataset: undersample every class to the minimum class
// count, then split each class train_frac / rest. Both sides are class
// balanced; train+test is exactly the undersampled set. Deterministic in
// seed. Throws ClassTooSmall when a class has fewer than 2 items.
struct BalancedSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
};

BalancedSplit split_balanced(const Dataset& ds, double train_frac, std::uint64_t seed);

// One split -> train -> predict -> metrics cycle.
struct RunReport {
    std::uint64_t seed = 0;
    ConfusionMatrix confusion;
    MetricsReport metrics;
    std::vector<double> epoch_mean_loss;
    BiLstmClassifier model;  // trained; not serialized into the JSON report
};

struct EvalProtocolConfig {
    Eigen::Index hidden = 20;
    std::size_t epochs = 5;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double train_frac = 0.5;
    std::size_t n_runs = 10;
    std::uint64_t base_seed = 0;

    TrainConfig train_config(std::uint64_t run_seed) const;
};

struct EvalReport {
    std::vector<std::string> class_vocab;
    std::vector<RunReport> runs;
    ConfusionMatrix confusion_sum;          // elementwise sum over runs
    std::vector<double> per_run_accuracies;
    double accuracy_mean = 0.0;             // arithmetic mean of per-run values
    MetricsReport mean_metrics;             // per-class means over runs
    std::string config_echo_json;           // filled by callers that own a config

    // Stable serialization: fixed key order, no timestamps; equal inputs give
    // byte-equal output.
    std::string to_json_string() const;
};

EvalReport load_eval_report(const std::filesystem::path& path);

// Runs the full split -> train -> predict -> metrics pipeline n_runs times
// with run seeds base_seed + i, averaging metrics and summing confusion
// counts.
EvalReport repeated_eval(const Dataset& ds, const EvalProtocolConfig& cfg);

// Plain-text confusion chart: true classes down the side, predicted classes
// along the bottom.
std::string render_confusion_chart(const ConfusionMatrix& cm);

// Metric table row(s) for a report: matrix kind, duration, accuracy, F-score,
// recall, precision (percentages). Multi-class reports show accuracy only.
std::string render_metrics_table(const EvalReport& report, const std::string& matrix_name,
                                 const std::string& duration_name);

}  // namespace eegclf
