#include <benchmark/benchmark.h>

#include "eegclf/features.hpp"
#include "eegclf/rng.hpp"

using namespace eegclf;

namespace {

Trial make_trial(std::size_t channels, std::size_t samples) {
    Rng rng(1);
    Trial t;
    t.sample_rate_hz = 2500.0;
    t.samples.resize(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples));
    for (Eigen::Index c = 0; c < t.samples.rows(); ++c) {
        for (Eigen::Index s = 0; s < t.samples.cols(); ++s) {
            t.samples(c, s) = rng.uniform(-100.0, 100.0);
        }
    }
    return t;
}

void SpectralEnergy(benchmark::State& state) {
    const Trial t = make_trial(1, static_cast<std::size_t>(state.range(0)));
    Fft fft;
    for (auto _ : state) {
        benchmark::DoNotOptimize(channel_energy(t, 0, fft));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(SpectralEnergy)->Arg(1000)->Arg(1024)->Arg(2500)->Arg(4999);

// One trial at paper geometry: 61 channels x 400 ms at 2500 Hz.
void EnergyMatrixPerTrial(benchmark::State& state) {
    const Trial t = make_trial(61, 1000);
    Fft fft;
    for (auto _ : state) {
        benchmark::DoNotOptimize(energy_diff_matrix(energy_vector(t, fft)));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(EnergyMatrixPerTrial);

void FeaturizeSpan(benchmark::State& state) {
    std::vector<Trial> trials;
    for (int i = 0; i < 49; ++i) {
        trials.push_back(make_trial(61, 1000));
    }
    const unsigned threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            featurize(trials, MatrixKind::Plain, SequenceAxis::Rows, threads));
    }
    state.SetItemsProcessed(state.iterations() * trials.size());
}
BENCHMARK(FeaturizeSpan)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
