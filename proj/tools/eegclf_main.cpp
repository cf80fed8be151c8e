// eegclf: command line front end for the EEG trial classification pipeline.
//
// Subcommands: synth, segment, featurize, train, eval, run, report.
// Exit codes: 0 success, 1 unexpected failure, 2 configuration/validation
// error, 3 data or contract error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eegclf/dataset.hpp"
#include "eegclf/errors.hpp"
#include "eegclf/evaluation.hpp"
#include "eegclf/experiment.hpp"
#include "eegclf/feature_archive.hpp"
#include "eegclf/manifest.hpp"
#include "eegclf/synthgen.hpp"

namespace fs = std::filesystem;
using namespace eegclf;

namespace {

MatrixKind parse_kind(const std::string& s) {
    if (s == "plain") return MatrixKind::Plain;
    if (s == "deriv" || s == "derivative") return MatrixKind::Derivative;
    throw ConfigError("--kind must be plain or deriv");
}

SequenceAxis parse_axis(const std::string& s) {
    if (s == "rows") return SequenceAxis::Rows;
    if (s == "cols") return SequenceAxis::Cols;
    throw ConfigError("--axis must be rows or cols");
}

std::vector<Recording> load_all(const fs::path& manifest_path) {
    const auto entries = load_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    std::vector<Recording> recs;
    recs.reserve(entries.size());
    for (const auto& e : entries) {
        recs.push_back(load_recording_entry(dir, e));
    }
    return recs;
}

void write_energy_csv(const fs::path& csv_path, const fs::path& manifest_path,
                      const PipelineConfig& cfg) {
    const auto entries = load_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();

    std::ofstream os(csv_path, std::ios::trunc);
    if (!os) {
        throw Error("cannot write CSV: " + csv_path.string());
    }
    os << std::setprecision(12);

    bool header_done = false;
    for (const auto& entry : entries) {
        Recording rec = load_recording_entry(dir, entry);
        if (!cfg.exclude_channels.empty()) {
            rec = exclude_channels(rec, cfg.exclude_channels);
        }
        if (!header_done) {
            os << "recording,subject,span,trial";
            for (const auto& name : rec.layout.names) {
                os << ',' << name << "_db";
            }
            os << '\n';
            header_done = true;
        }
        for (std::size_t s = 0; s < rec.spans.size(); ++s) {
            const auto trials = segment(rec, rec.spans[s], cfg.trial_len_s, cfg.overlap_frac);
            const auto evs = energy_vectors(trials, cfg.threads);
            for (std::size_t t = 0; t < evs.size(); ++t) {
                os << entry.path << ',' << entry.subject << ',' << s << ',' << t;
                for (Eigen::Index m = 0; m < evs[t].values_db.size(); ++m) {
                    os << ',' << evs[t].values_db(m);
                }
                os << '\n';
            }
        }
    }
}

std::string matrix_display_name(MatrixKind kind) {
    return kind == MatrixKind::Plain ? "E(n)" : "E'(n)";
}

void print_report(const EvalReport& report) {
    std::string matrix_name = "?";
    std::string duration_name = "?";
    if (!report.config_echo_json.empty()) {
        const auto cfg = nlohmann::json::parse(report.config_echo_json);
        if (cfg.contains("feature_kind")) {
            matrix_name =
                matrix_display_name(cfg.at("feature_kind") == "plain" ? MatrixKind::Plain
                                                                      : MatrixKind::Derivative);
        }
        if (cfg.contains("trial_ms")) {
            const double ms = cfg.at("trial_ms").get<double>();
            std::ostringstream d;
            if (ms == 1000.0) {
                d << "1 s";
            } else {
                d << ms << " ms";
            }
            duration_name = d.str();
        }
    }
    std::cout << "Aggregate confusion chart (" << report.runs.size() << " runs)\n"
              << render_confusion_chart(report.confusion_sum) << '\n'
              << render_metrics_table(report, matrix_name, duration_name) << '\n';
    std::cout << "Per-run accuracy:";
    for (const double a : report.per_run_accuracies) {
        std::cout << ' ' << std::fixed << std::setprecision(4) << a;
    }
    std::cout << std::defaultfloat << '\n';
}

int run_cli(int argc, char** argv) {
    CLI::App app{"EEG trial classification: energy-difference features + bi-LSTM"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
    std::string synth_classes;
    std::string synth_out;
    std::size_t synth_spans = 10;
    double synth_span_s = 30.0;
    double synth_rate = 2500.0;
    std::uint64_t synth_seed = 0;
    synth->add_option("--classes", synth_classes, "Class profiles JSON file")->required();
    synth->add_option("--spans", synth_spans, "Spans per class");
    synth->add_option("--span-s", synth_span_s, "Span duration in seconds");
    synth->add_option("--rate", synth_rate, "Sample rate in Hz");
    synth->add_option("--seed", synth_seed, "Generation seed");
    synth->add_option("--out", synth_out, "Output directory")->required();

    // ---- segment ----
    auto* seg = app.add_subcommand("segment", "Report trial counts for a manifest");
    std::string seg_manifest;
    double seg_trial_ms = 400.0;
    double seg_overlap = 0.5;
    seg->add_option("--manifest", seg_manifest, "Dataset manifest JSON")->required();
    seg->add_option("--trial-ms", seg_trial_ms, "Trial duration in milliseconds");
    seg->add_option("--overlap", seg_overlap, "Overlap fraction in [0,1)");

    // ---- featurize ----
    auto* feat = app.add_subcommand("featurize", "Build a feature archive from a manifest");
    std::string feat_manifest, feat_out, feat_kind = "plain", feat_axis = "rows";
    std::string feat_label_kind = "audio_type";
    std::string feat_energy_csv;
    std::vector<std::string> feat_exclude;
    double feat_trial_ms = 400.0;
    double feat_overlap = 0.5;
    unsigned feat_threads = 0;
    feat->add_option("--manifest", feat_manifest, "Dataset manifest JSON")->required();
    feat->add_option("--out", feat_out, "Output .eegf archive")->required();
    feat->add_option("--kind", feat_kind, "plain | deriv");
    feat->add_option("--axis", feat_axis, "rows | cols (timestep axis)");
    feat->add_option("--label-kind", feat_label_kind,
                     "audio_type | genre | taste | taste3 | language");
    feat->add_option("--trial-ms", feat_trial_ms, "Trial duration in milliseconds");
    feat->add_option("--overlap", feat_overlap, "Overlap fraction in [0,1)");
    feat->add_option("--exclude", feat_exclude, "Channels to drop (e.g. FCz FT9 FT10)");
    feat->add_option("--threads", feat_threads,
                     "Worker threads (default: EEGCLF_THREADS env var, else 1)");
    feat->add_option("--energy-csv", feat_energy_csv,
                     "Also write per-trial per-channel dB energies as CSV");

    // ---- train ----
    auto* tr = app.add_subcommand("train", "Train one model on a feature archive");
    std::string tr_features, tr_out;
    std::size_t tr_epochs = 5, tr_batch = 32;
    Eigen::Index tr_hidden = 20;
    double tr_lr = 1e-3;
    std::uint64_t tr_seed = 0;
    tr->add_option("--features", tr_features, "Input .eegf archive")->required();
    tr->add_option("--out", tr_out, "Output checkpoint path")->required();
    tr->add_option("--epochs", tr_epochs, "Training epochs");
    tr->add_option("--hidden", tr_hidden, "Hidden units per direction");
    tr->add_option("--lr", tr_lr, "Learning rate");
    tr->add_option("--batch", tr_batch, "Batch size");
    tr->add_option("--seed", tr_seed, "Init + shuffle seed");

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "Repeated split/train/test evaluation");
    std::string ev_features, ev_out;
    std::size_t ev_runs = 10, ev_epochs = 5, ev_batch = 32;
    Eigen::Index ev_hidden = 20;
    double ev_lr = 1e-3, ev_train_frac = 0.5;
    std::uint64_t ev_seed = 0;
    ev->add_option("--features", ev_features, "Input .eegf archive")->required();
    ev->add_option("--out", ev_out, "Output report JSON")->required();
    ev->add_option("--runs", ev_runs, "Number of repetitions");
    ev->add_option("--train-frac", ev_train_frac, "Training fraction of each class");
    ev->add_option("--seed", ev_seed, "Base seed; run i uses seed+i");
    ev->add_option("--epochs", ev_epochs, "Training epochs");
    ev->add_option("--hidden", ev_hidden, "Hidden units per direction");
    ev->add_option("--lr", ev_lr, "Learning rate");
    ev->add_option("--batch", ev_batch, "Batch size");

    // ---- run ----
    auto* run = app.add_subcommand("run", "Full pipeline from an experiment config");
    std::string run_config;
    run->add_option("--config", run_config, "Experiment config JSON")->required();

    // ---- report ----
    auto* rep = app.add_subcommand("report", "Render a stored report as text");
    std::string rep_path;
    rep->add_option("--report", rep_path, "report.json produced by eval or run")->required();

    CLI11_PARSE(app, argc, argv);

    if (synth->parsed()) {
        SynthConfig cfg = load_synth_config(synth_classes);
        cfg.spans_per_class = synth_spans;
        cfg.span_s = synth_span_s;
        cfg.sample_rate_hz = synth_rate;
        cfg.seed = synth_seed;
        const auto manifest = write_synth_dataset(synth_out, cfg);
        std::cout << "wrote " << manifest.string() << '\n';
        return 0;
    }

    if (seg->parsed()) {
        const auto recs = load_all(seg_manifest);
        std::size_t total = 0;
        for (const auto& rec : recs) {
            for (std::size_t s = 0; s < rec.spans.size(); ++s) {
                const auto trials =
                    segment(rec, rec.spans[s], seg_trial_ms / 1000.0, seg_overlap);
                std::cout << rec.subject_id << " span " << s << " [" << rec.spans[s].start_s
                          << "s, " << rec.spans[s].end_s << "s): " << trials.size()
                          << " trials\n";
                total += trials.size();
            }
        }
        std::cout << "total: " << total << " trials of "
                  << trial_length_samples(seg_trial_ms / 1000.0, recs.front().sample_rate_hz)
                  << " samples\n";
        return 0;
    }

    if (feat->parsed()) {
        PipelineConfig cfg;
        cfg.trial_len_s = feat_trial_ms / 1000.0;
        cfg.overlap_frac = feat_overlap;
        cfg.feature_kind = parse_kind(feat_kind);
        cfg.axis = parse_axis(feat_axis);
        cfg.exclude_channels = feat_exclude;
        cfg.threads = feat_threads;
        const Dataset ds = build_dataset(fs::path(feat_manifest),
                                         parse_label_kind(feat_label_kind), cfg);
        save_feature_archive(feat_out, ds, cfg.feature_kind);
        std::cout << "wrote " << feat_out << ": " << ds.size() << " sequences, "
                  << ds.class_vocab.size() << " classes, C=" << ds.feature_dim() << '\n';
        if (!feat_energy_csv.empty()) {
            write_energy_csv(feat_energy_csv, feat_manifest, cfg);
            std::cout << "wrote " << feat_energy_csv << '\n';
        }
        return 0;
    }

    if (tr->parsed()) {
        const auto archive = load_feature_archive(tr_features);
        const auto& ds = archive.dataset;
        const auto initial = BiLstmClassifier::initialized(ds.feature_dim(), tr_hidden,
                                                           ds.class_vocab, tr_seed);
        TrainConfig cfg;
        cfg.epochs = tr_epochs;
        cfg.learning_rate = tr_lr;
        cfg.batch_size = tr_batch;
        cfg.seed = tr_seed;
        const TrainResult result = train(initial, ds, cfg);
        save_checkpoint(tr_out, result.model);
        for (std::size_t e = 0; e < result.epoch_mean_loss.size(); ++e) {
            std::cout << "epoch " << (e + 1) << " mean loss " << std::setprecision(6)
                      << result.epoch_mean_loss[e] << '\n';
        }
        std::cout << "wrote " << tr_out << '\n';
        return 0;
    }

    if (ev->parsed()) {
        const auto archive = load_feature_archive(ev_features);
        EvalProtocolConfig cfg;
        cfg.hidden = ev_hidden;
        cfg.epochs = ev_epochs;
        cfg.learning_rate = ev_lr;
        cfg.batch_size = ev_batch;
        cfg.train_frac = ev_train_frac;
        cfg.n_runs = ev_runs;
        cfg.base_seed = ev_seed;
        const EvalReport report = repeated_eval(archive.dataset, cfg);
        std::ofstream os(ev_out, std::ios::trunc | std::ios::binary);
        if (!os) {
            throw Error("cannot write report: " + ev_out);
        }
        os << report.to_json_string();
        print_report(report);
        std::cout << "wrote " << ev_out << '\n';
        return 0;
    }

    if (run->parsed()) {
        const auto cfg = ExperimentConfig::from_json_file(run_config);
        const EvalReport report = run_experiment(cfg);
        print_report(report);
        std::cout << "artifacts under " << cfg.out_dir.string() << '\n';
        return 0;
    }

    if (rep->parsed()) {
        print_report(load_eval_report(rep_path));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ZeroHop& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
}
