#include <benchmark/benchmark.h>

#include "eegclf/bilstm.hpp"
#include "eegclf/rng.hpp"

using namespace eegclf;

namespace {

FeatureSequence make_sequence(Eigen::Index steps, Eigen::Index dim) {
    Rng rng(2);
    FeatureSequence seq;
    seq.rows.resize(steps, dim);
    for (Eigen::Index r = 0; r < steps; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            seq.rows(r, c) = rng.uniform(-20.0, 20.0);
        }
    }
    return seq;
}

// Paper geometry: 61 inputs, 61 timesteps, 20 hidden units, 2 classes.
void ForwardPass(benchmark::State& state) {
    const auto model = BiLstmClassifier::initialized(61, 20, {"M", "V"}, 3);
    const FeatureSequence seq = make_sequence(61, 61);
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward(model, seq));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(ForwardPass);

void BackwardPass(benchmark::State& state) {
    const auto model = BiLstmClassifier::initialized(61, 20, {"M", "V"}, 3);
    const FeatureSequence seq = make_sequence(61, 61);
    for (auto _ : state) {
        benchmark::DoNotOptimize(backward(model, seq, 0));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BackwardPass);

void TrainEpoch(benchmark::State& state) {
    Dataset ds;
    ds.class_vocab = {"M", "V"};
    for (int i = 0; i < 64; ++i) {
        ds.items.push_back(make_sequence(61, 61));
        ds.labels.push_back(static_cast<std::size_t>(i % 2));
    }
    const auto initial = BiLstmClassifier::initialized(61, 20, ds.class_vocab, 4);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(train(initial, ds, cfg));
    }
    state.SetItemsProcessed(state.iterations() * ds.size());
}
BENCHMARK(TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
