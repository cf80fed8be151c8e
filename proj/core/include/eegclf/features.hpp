#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "eegclf/fft.hpp"
#include "eegclf/segmentation.hpp"

namespace eegclf {

enum class MatrixKind {
    Plain,      // pairwise dB energy differences of one trial
    Derivative  // centered difference of Plain matrices across trials
};

// Per-channel signal energy of one trial, in dB.
struct EnergyVector {
    Eigen::VectorXd values_db;
};

// C x C matrix of pairwise dB energy differences: m(i,j) = E_i - E_j.
// Plain matrices have an exactly zero diagonal and are exactly antisymmetric;
// Derivative matrices inherit antisymmetry.
struct EnergyDiffMatrix {
    Eigen::MatrixXd m;
    MatrixKind kind = MatrixKind::Plain;
};

// A feature matrix presented to the classifier as a sequence: timestep t is
// row t (C timesteps of C values each).
struct FeatureSequence {
    Eigen::MatrixXd rows;

    Eigen::Index steps() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
};

// Which matrix axis becomes the timestep axis. Rows is the default reading;
// Cols feeds the transpose (for Plain matrices the two differ only by sign).
enum class SequenceAxis { Rows, Cols };

// Linear energies below this floor are clamped before the dB conversion, so
// an all-zero synthetic channel maps to a large negative dB value instead of
// -inf. Real EEG never reaches exact zero.
inline constexpr double kEnergyFloor = 1e-30;

// Signal energy of one channel: (1/N) sum_k |X[k]|^2 over the full discrete
// spectrum, which equals sum_t x[t]^2 (microvolt^2 * sample). channel is
// 0-based.
double channel_energy(const Trial& trial, std::size_t channel, Fft& fft);

// 10*log10(e), with e clamped to kEnergyFloor. Throws NegativeEnergy for
// e < 0, which cannot come out of channel_energy and signals corruption.
double energy_db(double linear_energy);

EnergyVector energy_vector(const Trial& trial, Fft& fft);

// m(i,j) = ev[i] - ev[j]. Requires at least 2 channels.
EnergyDiffMatrix energy_diff_matrix(const EnergyVector& ev);

// Centered derivative across trials: (next - prev) / 2 elementwise, where
// prev and next are the Plain matrices of trials n-1 and n+1. Throws
// KindMismatch or ShapeMismatch.
EnergyDiffMatrix derivative_matrix(const EnergyDiffMatrix& prev, const EnergyDiffMatrix& next);

FeatureSequence to_sequence(const EnergyDiffMatrix& mat, SequenceAxis axis);

// Featurizes one span's trials, in trial order. Plain yields one sequence per
// trial; Derivative yields one per interior trial (the first and last are
// dropped; the centered form needs both neighbours). threads == 0 reads
// EEGCLF_THREADS, defaulting to 1; output is identical regardless of thread
// count. Throws TooFewTrials for Derivative with fewer than 3 trials.
std::vector<FeatureSequence> featurize(const std::vector<Trial>& trials, MatrixKind kind,
                                       SequenceAxis axis = SequenceAxis::Rows,
                                       unsigned threads = 0);

// Energy vectors for a list of trials, parallelized the same way as
// featurize. Used by featurize and by the per-channel CSV export.
std::vector<EnergyVector> energy_vectors(const std::vector<Trial>& trials, unsigned threads = 0);

unsigned resolve_thread_count(unsigned requested);

}  // namespace eegclf
