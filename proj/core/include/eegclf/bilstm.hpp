#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eegclf/dataset.hpp"

namespace eegclf {

// Parameters of one LSTM direction. The 4H gate rows are blocked in a fixed
// order: input, forget, cell candidate, output.
struct LstmDirectionParams {
    Eigen::MatrixXd W;  // 4H x F, input-to-gates
    Eigen::MatrixXd U;  // 4H x H, hidden-to-gates
    Eigen::VectorXd b;  // 4H

    Eigen::Index hidden() const { return U.cols(); }
    Eigen::Index features() const { return W.cols(); }
};

// Sequence classifier: two LSTM directions read the sequence forward and
// backward, their final hidden states are concatenated (2H) and mapped to
// class logits by a fully connected layer, then softmax.
struct BiLstmClassifier {
    LstmDirectionParams fwd;
    LstmDirectionParams bwd;
    Eigen::MatrixXd fc_w;  // K x 2H
    Eigen::VectorXd fc_b;  // K
    std::vector<std::string> class_vocab;

    Eigen::Index hidden() const { return fwd.hidden(); }
    Eigen::Index features() const { return fwd.features(); }
    Eigen::Index classes() const { return fc_b.size(); }

    void validate() const;

    // Fresh model: weights uniform in [-1/sqrt(H), 1/sqrt(H)], biases zero
    // except the forget-gate block, which starts at 1. Deterministic in seed.
    static BiLstmClassifier initialized(Eigen::Index features, Eigen::Index hidden,
                                        std::vector<std::string> class_vocab,
                                        std::uint64_t seed);
};

// Same shapes as the model parameters; used for gradients and Adam state.
struct ParamBlocks {
    LstmDirectionParams fwd;
    LstmDirectionParams bwd;
    Eigen::MatrixXd fc_w;
    Eigen::VectorXd fc_b;

    static ParamBlocks zeros_like(const BiLstmClassifier& model);
};

// Class probabilities for one sequence. Softmax output: entries in (0,1),
// summing to 1. Throws ShapeMismatch if the row width is not the model's F.
Eigen::VectorXd forward(const BiLstmClassifier& model, const FeatureSequence& seq);

// Cross-entropy -log(probs[label]); the probability is floored at 1e-12 so a
// fully confident wrong prediction stays finite.
double loss(const Eigen::VectorXd& probs, std::size_t label);

// Exact gradients of loss(forward(model, seq), label) with respect to every
// parameter, by backpropagation through time over both directions. If
// loss_out is non-null it receives the forward loss of this sample.
ParamBlocks backward(const BiLstmClassifier& model, const FeatureSequence& seq,
                     std::size_t label, double* loss_out = nullptr);

std::size_t predict(const BiLstmClassifier& model, const FeatureSequence& seq);

struct TrainConfig {
    std::size_t epochs = 5;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;  // drives epoch shuffling (and init, via callers)
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainResult {
    BiLstmClassifier model;
    std::vector<double> epoch_mean_loss;  // one entry per epoch
};

// Minibatch Adam. Single-threaded with a fixed accumulation order, so the
// result is a pure function of (initial model, dataset order, cfg): equal
// seeds give bitwise-equal parameters. Throws EmptyDataset.
TrainResult train(const BiLstmClassifier& initial, const Dataset& ds, const TrainConfig& cfg);

// Checkpoint (.ckpt), little-endian: magic "EEGM", u16 version, u32 F, u32 H,
// u32 K, class names (u16 length + UTF-8), then f64 blocks in declared order
// (fwd.W, fwd.U, fwd.b, bwd.W, bwd.U, bwd.b, fc_w, fc_b), matrices row-major.
inline constexpr char kCheckpointMagic[4] = {'E', 'E', 'G', 'M'};
inline constexpr std::uint16_t kCheckpointVersion = 1;

void save_checkpoint(const std::filesystem::path& path, const BiLstmClassifier& model);
BiLstmClassifier load_checkpoint(const std::filesystem::path& path);

}  // namespace eegclf
