#include "eegclf/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>

#include "eegclf/errors.hpp"

namespace eegclf {

double channel_energy(const Trial& trial, std::size_t channel, Fft& fft) {
    if (channel >= static_cast<std::size_t>(trial.samples.rows())) {
        throw IndexOutOfRange("channel index " + std::to_string(channel) + " out of range");
    }
    const Eigen::VectorXd row = trial.samples.row(static_cast<Eigen::Index>(channel));
    return fft.spectral_energy(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
}

double energy_db(double linear_energy) {
    if (linear_energy < 0.0) {
        throw NegativeEnergy("negative linear energy: " + std::to_string(linear_energy));
    }
    return 10.0 * std::log10(std::max(linear_energy, kEnergyFloor));
}

EnergyVector energy_vector(const Trial& trial, Fft& fft) {
    EnergyVector ev;
    ev.values_db.resize(trial.samples.rows());
    for (Eigen::Index m = 0; m < trial.samples.rows(); ++m) {
        ev.values_db(m) = energy_db(channel_energy(trial, static_cast<std::size_t>(m), fft));
    }
    return ev;
}

EnergyDiffMatrix energy_diff_matrix(const EnergyVector& ev) {
    const Eigen::Index c = ev.values_db.size();
    if (c < 2) {
        throw ShapeMismatch("energy vector needs at least 2 channels");
    }
    EnergyDiffMatrix out;
    out.kind = MatrixKind::Plain;
    out.m.resize(c, c);
    // Differences of identical stored values: the diagonal is exactly zero
    // and m(i,j) == -m(j,i) bitwise, not just approximately.
    for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            out.m(i, j) = ev.values_db(i) - ev.values_db(j);
        }
    }
    return out;
}

EnergyDiffMatrix derivative_matrix(const EnergyDiffMatrix& prev, const EnergyDiffMatrix& next) {
    if (prev.kind != MatrixKind::Plain || next.kind != MatrixKind::Plain) {
        throw KindMismatch("derivative inputs must be plain energy-difference matrices");
    }
    if (prev.m.rows() != next.m.rows() || prev.m.cols() != next.m.cols()) {
        throw ShapeMismatch("derivative inputs differ in shape");
    }
    EnergyDiffMatrix out;
    out.kind = MatrixKind::Derivative;
    out.m = (next.m - prev.m) / 2.0;
    return out;
}

FeatureSequence to_sequence(const EnergyDiffMatrix& mat, SequenceAxis axis) {
    FeatureSequence seq;
    seq.rows = (axis == SequenceAxis::Rows) ? mat.m : mat.m.transpose();
    return seq;
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    if (const char* env = std::getenv("EEGCLF_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) {
            return static_cast<unsigned>(n);
        }
    }
    return 1;
}

namespace {

// Runs fn(i) for i in [0, n) across the given number of worker threads.
// Workers write to disjoint, preassigned indices, so the result does not
// depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::vector<EnergyVector> energy_vectors(const std::vector<Trial>& trials, unsigned threads) {
    std::vector<EnergyVector> out(trials.size());
    const unsigned workers = resolve_thread_count(threads);
    if (workers <= 1) {
        Fft fft;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            out[i] = energy_vector(trials[i], fft);
        }
        return out;
    }
    // One Fft (and thus one plan set) per worker; FFTW plans must not be
    // executed concurrently.
    std::vector<Fft> ffts(workers);
    parallel_for(trials.size(), workers, [&](std::size_t i) {
        out[i] = energy_vector(trials[i], ffts[i % workers]);
    });
    return out;
}

std::vector<FeatureSequence> featurize(const std::vector<Trial>& trials, MatrixKind kind,
                                       SequenceAxis axis, unsigned threads) {
    if (trials.empty()) {
        throw TooFewTrials("no trials to featurize");
    }
    const Eigen::Index rows = trials.front().samples.rows();
    const Eigen::Index cols = trials.front().samples.cols();
    for (const auto& t : trials) {
        if (t.samples.rows() != rows || t.samples.cols() != cols) {
            throw ShapeMismatch("trials passed to featurize differ in shape");
        }
    }
    if (kind == MatrixKind::Derivative && trials.size() < 3) {
        throw TooFewTrials("derivative features need at least 3 consecutive trials");
    }

    const auto evs = energy_vectors(trials, threads);
    std::vector<EnergyDiffMatrix> plain(evs.size());
    for (std::size_t i = 0; i < evs.size(); ++i) {
        plain[i] = energy_diff_matrix(evs[i]);
    }

    std::vector<FeatureSequence> out;
    if (kind == MatrixKind::Plain) {
        out.reserve(plain.size());
        for (const auto& p : plain) {
            out.push_back(to_sequence(p, axis));
        }
    } else {
        // Centered form: interior trials only, no one-sided fallback at the
        // span edges.
        out.reserve(plain.size() - 2);
        for (std::size_t n = 1; n + 1 < plain.size(); ++n) {
            out.push_back(to_sequence(derivative_matrix(plain[n - 1], plain[n + 1]), axis));
        }
    }
    return out;
}

}  // namespace eegclf
