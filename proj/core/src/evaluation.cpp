#include "eegclf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eegclf/errors.hpp"
#include "eegclf/rng.hpp"

namespace eegclf {

namespace {
constexpr std::uint64_t kInitStream = 2;
constexpr std::uint64_t kSplitStream = 3;

using ordered_json = nlohmann::ordered_json;
}  // namespace

ConfusionMatrix confusion(std::span<const std::size_t> truths, std::span<const std::size_t> preds,
                          std::vector<std::string> class_vocab) {
    if (truths.size() != preds.size()) {
        throw LengthMismatch("truth and prediction lists differ in length");
    }
    const auto k = static_cast<Eigen::Index>(class_vocab.size());
    ConfusionMatrix cm;
    cm.class_vocab = std::move(class_vocab);
    cm.counts.setZero(k, k);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] >= static_cast<std::size_t>(k) || preds[i] >= static_cast<std::size_t>(k)) {
            throw IndexOutOfRange("class index out of range in confusion input");
        }
        cm.counts(static_cast<Eigen::Index>(truths[i]), static_cast<Eigen::Index>(preds[i])) += 1;
    }
    return cm;
}

const ClassMetrics& MetricsReport::positive(std::size_t positive_class) const {
    if (positive_class >= per_class.size()) {
        throw IndexOutOfRange("positive class index out of range");
    }
    return per_class[positive_class];
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.total();
    if (total == 0) {
        throw EmptyMatrix("confusion matrix holds no observations");
    }
    MetricsReport r;
    r.accuracy = static_cast<double>(cm.diagonal_total()) / static_cast<double>(total);
    const Eigen::Index k = cm.counts.rows();
    r.per_class.resize(static_cast<std::size_t>(k));
    for (Eigen::Index c = 0; c < k; ++c) {
        ClassMetrics& m = r.per_class[static_cast<std::size_t>(c)];
        const std::int64_t row_sum = cm.counts.row(c).sum();
        const std::int64_t col_sum = cm.counts.col(c).sum();
        const std::int64_t hit = cm.counts(c, c);
        if (row_sum > 0) {
            m.recall = static_cast<double>(hit) / static_cast<double>(row_sum);
            m.recall_defined = true;
        }
        if (col_sum > 0) {
            m.precision = static_cast<double>(hit) / static_cast<double>(col_sum);
            m.precision_defined = true;
        }
        if (m.recall_defined && m.precision_defined && m.precision + m.recall > 0.0) {
            m.f_score = 2.0 * m.precision * m.recall / (m.precision + m.recall);
            m.f_defined = true;
        }
    }
    return r;
}

BalancedSplit split_balanced(const Dataset& ds, double train_frac, std::uint64_t seed) {
    if (!(train_frac > 0.0) || !(train_frac < 1.0)) {
        throw ConfigError("train_frac must lie in (0, 1)");
    }
    ds.validate();

    std::vector<std::vector<std::size_t>> by_class(ds.class_vocab.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        by_class[ds.labels[i]].push_back(i);
    }
    std::size_t min_count = ds.size();
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        if (by_class[c].size() < 2) {
            throw ClassTooSmall("class '" + ds.class_vocab[c] + "' has fewer than 2 items");
        }
        min_count = std::min(min_count, by_class[c].size());
    }

    Rng rng(Rng::stream_seed(seed, kSplitStream));
    const auto n_train = static_cast<std::size_t>(
        std::llround(static_cast<double>(min_count) * train_frac));

    BalancedSplit split;
    for (auto& indices : by_class) {
        // Shuffle, undersample to the minimum class count, then cut.
        rng.shuffle(indices);
        for (std::size_t i = 0; i < min_count; ++i) {
            (i < n_train ? split.train_indices : split.test_indices).push_back(indices[i]);
        }
    }
    return split;
}

TrainConfig EvalProtocolConfig::train_config(std::uint64_t run_seed) const {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.learning_rate = learning_rate;
    cfg.batch_size = batch_size;
    cfg.seed = run_seed;
    cfg.adam_beta1 = adam_beta1;
    cfg.adam_beta2 = adam_beta2;
    cfg.adam_eps = adam_eps;
    return cfg;
}

EvalReport repeated_eval(const Dataset& ds, const EvalProtocolConfig& cfg) {
    if (cfg.n_runs < 1) {
        throw ConfigError("n_runs must be >= 1");
    }
    ds.validate();
    if (ds.class_vocab.size() < 2) {
        throw ClassTooSmall("evaluation needs at least 2 classes");
    }

    EvalReport report;
    report.class_vocab = ds.class_vocab;
    report.confusion_sum.class_vocab = ds.class_vocab;
    report.confusion_sum.counts.setZero(static_cast<Eigen::Index>(ds.class_vocab.size()),
                                        static_cast<Eigen::Index>(ds.class_vocab.size()));

    for (std::size_t i = 0; i < cfg.n_runs; ++i) {
        const std::uint64_t run_seed = cfg.base_seed + i;
        const BalancedSplit split = split_balanced(ds, cfg.train_frac, run_seed);
        const Dataset train_ds = subset(ds, split.train_indices);
        const Dataset test_ds = subset(ds, split.test_indices);

        const auto initial = BiLstmClassifier::initialized(
            ds.feature_dim(), cfg.hidden, ds.class_vocab, Rng::stream_seed(run_seed, kInitStream));
        TrainResult trained = train(initial, train_ds, cfg.train_config(run_seed));

        std::vector<std::size_t> preds;
        preds.reserve(test_ds.size());
        for (const auto& item : test_ds.items) {
            preds.push_back(predict(trained.model, item));
        }

        RunReport run;
        run.seed = run_seed;
        run.confusion = confusion(test_ds.labels, preds, ds.class_vocab);
        run.metrics = metrics(run.confusion);
        run.epoch_mean_loss = std::move(trained.epoch_mean_loss);
        run.model = std::move(trained.model);

        report.confusion_sum.counts += run.confusion.counts;
        report.per_run_accuracies.push_back(run.metrics.accuracy);
        report.runs.push_back(std::move(run));
    }

    double acc_sum = 0.0;
    for (const double a : report.per_run_accuracies) {
        acc_sum += a;
    }
    report.accuracy_mean = acc_sum / static_cast<double>(cfg.n_runs);

    // Per-class means over runs; a mean is flagged defined only when the
    // metric was defined in every run.
    report.mean_metrics.accuracy = report.accuracy_mean;
    report.mean_metrics.per_class.resize(ds.class_vocab.size());
    for (std::size_t c = 0; c < ds.class_vocab.size(); ++c) {
        ClassMetrics& mean = report.mean_metrics.per_class[c];
        mean.precision_defined = mean.recall_defined = mean.f_defined = true;
        for (const auto& run : report.runs) {
            const ClassMetrics& m = run.metrics.per_class[c];
            mean.precision += m.precision;
            mean.recall += m.recall;
            mean.f_score += m.f_score;
            mean.precision_defined = mean.precision_defined && m.precision_defined;
            mean.recall_defined = mean.recall_defined && m.recall_defined;
            mean.f_defined = mean.f_defined && m.f_defined;
        }
        const auto n = static_cast<double>(report.runs.size());
        mean.precision /= n;
        mean.recall /= n;
        mean.f_score /= n;
    }
    return report;
}

namespace {

ordered_json class_metrics_to_json(const ClassMetrics& m, const std::string& name) {
    return ordered_json{{"class", name},
                        {"precision", m.precision},
                        {"recall", m.recall},
                        {"f_score", m.f_score},
                        {"precision_defined", m.precision_defined},
                        {"recall_defined", m.recall_defined},
                        {"f_defined", m.f_defined}};
}

ClassMetrics class_metrics_from_json(const ordered_json& j) {
    ClassMetrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f_score = j.at("f_score").get<double>();
    m.precision_defined = j.at("precision_defined").get<bool>();
    m.recall_defined = j.at("recall_defined").get<bool>();
    m.f_defined = j.at("f_defined").get<bool>();
    return m;
}

ordered_json counts_to_json(const ConfusionMatrix& cm) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index r = 0; r < cm.counts.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < cm.counts.cols(); ++c) {
            row.push_back(cm.counts(r, c));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ConfusionMatrix counts_from_json(const ordered_json& j, std::vector<std::string> vocab) {
    ConfusionMatrix cm;
    cm.class_vocab = std::move(vocab);
    const auto k = static_cast<Eigen::Index>(j.size());
    cm.counts.setZero(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            cm.counts(r, c) = j.at(static_cast<std::size_t>(r))
                                  .at(static_cast<std::size_t>(c))
                                  .get<std::int64_t>();
        }
    }
    return cm;
}

}  // namespace

std::string EvalReport::to_json_string() const {
    ordered_json doc;
    doc["schema_version"] = 1;
    if (config_echo_json.empty()) {
        doc["config"] = nullptr;
    } else {
        doc["config"] = ordered_json::parse(config_echo_json);
    }
    doc["class_vocab"] = class_vocab;
    doc["runs"] = runs.size();

    ordered_json per_run = ordered_json::array();
    for (const auto& run : runs) {
        ordered_json j;
        j["seed"] = run.seed;
        j["accuracy"] = run.metrics.accuracy;
        ordered_json per_class = ordered_json::array();
        for (std::size_t c = 0; c < run.metrics.per_class.size(); ++c) {
            per_class.push_back(class_metrics_to_json(run.metrics.per_class[c], class_vocab[c]));
        }
        j["per_class"] = std::move(per_class);
        j["confusion"] = counts_to_json(run.confusion);
        j["epoch_mean_loss"] = run.epoch_mean_loss;
        per_run.push_back(std::move(j));
    }
    doc["per_run"] = std::move(per_run);

    ordered_json agg;
    agg["accuracy_mean"] = accuracy_mean;
    agg["per_run_accuracies"] = per_run_accuracies;
    agg["confusion_sum"] = counts_to_json(confusion_sum);
    ordered_json mean_class = ordered_json::array();
    for (std::size_t c = 0; c < mean_metrics.per_class.size(); ++c) {
        mean_class.push_back(class_metrics_to_json(mean_metrics.per_class[c], class_vocab[c]));
    }
    agg["per_class_mean"] = std::move(mean_class);
    doc["aggregate"] = std::move(agg);

    return doc.dump(2) + "\n";
}

EvalReport load_eval_report(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw Error("cannot open report: " + path.string());
    }
    ordered_json doc;
    try {
        is >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("report is not valid JSON: " + std::string(e.what()));
    }

    EvalReport report;
    if (doc.contains("config") && !doc.at("config").is_null()) {
        report.config_echo_json = doc.at("config").dump();
    }
    report.class_vocab = doc.at("class_vocab").get<std::vector<std::string>>();
    for (const auto& j : doc.at("per_run")) {
        RunReport run;
        run.seed = j.at("seed").get<std::uint64_t>();
        run.confusion = counts_from_json(j.at("confusion"), report.class_vocab);
        run.metrics.accuracy = j.at("accuracy").get<double>();
        for (const auto& pc : j.at("per_class")) {
            run.metrics.per_class.push_back(class_metrics_from_json(pc));
        }
        run.epoch_mean_loss = j.at("epoch_mean_loss").get<std::vector<double>>();
        report.runs.push_back(std::move(run));
    }
    const auto& agg = doc.at("aggregate");
    report.accuracy_mean = agg.at("accuracy_mean").get<double>();
    report.per_run_accuracies = agg.at("per_run_accuracies").get<std::vector<double>>();
    report.confusion_sum = counts_from_json(agg.at("confusion_sum"), report.class_vocab);
    report.mean_metrics.accuracy = report.accuracy_mean;
    for (const auto& pc : agg.at("per_class_mean")) {
        report.mean_metrics.per_class.push_back(class_metrics_from_json(pc));
    }
    return report;
}

std::string render_confusion_chart(const ConfusionMatrix& cm) {
    const Eigen::Index k = cm.counts.rows();
    std::size_t cell = 5;
    for (const auto& name : cm.class_vocab) {
        cell = std::max(cell, name.size() + 2);
    }
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
            cell = std::max(cell, std::to_string(cm.counts(r, c)).size() + 2);
        }
    }

    std::ostringstream out;
    out << "True class\n";
    for (Eigen::Index r = 0; r < k; ++r) {
        out << "  " << std::setw(static_cast<int>(cell))
            << cm.class_vocab[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < k; ++c) {
            out << std::setw(static_cast<int>(cell)) << cm.counts(r, c);
        }
        out << '\n';
    }
    out << "  " << std::setw(static_cast<int>(cell)) << "";
    for (Eigen::Index c = 0; c < k; ++c) {
        out << std::setw(static_cast<int>(cell)) << cm.class_vocab[static_cast<std::size_t>(c)];
    }
    out << "\n  " << std::setw(static_cast<int>(cell)) << "" << "  Predicted class\n";
    return out.str();
}

std::string render_metrics_table(const EvalReport& report, const std::string& matrix_name,
                                 const std::string& duration_name) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(2);
    const bool binary = report.class_vocab.size() == 2;
    if (binary) {
        const ClassMetrics& positive = report.mean_metrics.positive(0);
        out << "Matrix  Duration  Accuracy (%)  F-score (%)  Recall (%)  Precision (%)\n";
        out << std::setw(6) << std::left << matrix_name << "  " << std::setw(8) << duration_name
            << std::right << "  " << std::setw(12) << 100.0 * report.accuracy_mean << "  "
            << std::setw(11) << 100.0 * positive.f_score << "  " << std::setw(10)
            << 100.0 * positive.recall << "  " << std::setw(13) << 100.0 * positive.precision
            << '\n';
    } else {
        out << "Matrix  Duration  Accuracy (%)\n";
        out << std::setw(6) << std::left << matrix_name << "  " << std::setw(8) << duration_name
            << std::right << "  " << std::setw(12) << 100.0 * report.accuracy_mean << '\n';
    }
    return out.str();
}

}  // namespace eegclf
