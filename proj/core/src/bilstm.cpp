#include "eegclf/bilstm.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <numeric>

#include "binary_io.hpp"
#include "eegclf/errors.hpp"
#include "eegclf/rng.hpp"

namespace eegclf {

namespace {

// Gate block offsets inside the 4H axis; order is part of the model contract
// (checkpoint compatibility and tests depend on it).
enum GateBlock { kInput = 0, kForget = 1, kCandidate = 2, kOutput = 3 };

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) {
    return 1.0 / (1.0 + (-x).exp());
}

// Everything the backward pass needs from one direction's forward sweep.
// Column t holds the state after processing the t-th input of this
// direction's reading order; h has a leading zero column for the pre-state.
struct DirectionTrace {
    Eigen::MatrixXd gate_i, gate_f, gate_g, gate_o;  // H x T
    Eigen::MatrixXd c;                               // H x T
    Eigen::MatrixXd tanh_c;                          // H x T
    Eigen::MatrixXd h;                               // H x (T+1), col 0 zero

    Eigen::VectorXd final_h() const { return h.col(h.cols() - 1); }
};

DirectionTrace run_direction(const LstmDirectionParams& p, const FeatureSequence& seq,
                             bool reversed) {
    const Eigen::Index hidden = p.hidden();
    const Eigen::Index steps = seq.steps();

    DirectionTrace tr;
    tr.gate_i.resize(hidden, steps);
    tr.gate_f.resize(hidden, steps);
    tr.gate_g.resize(hidden, steps);
    tr.gate_o.resize(hidden, steps);
    tr.c.resize(hidden, steps);
    tr.tanh_c.resize(hidden, steps);
    tr.h.setZero(hidden, steps + 1);

    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(hidden);
    for (Eigen::Index t = 0; t < steps; ++t) {
        const Eigen::Index row = reversed ? steps - 1 - t : t;
        const Eigen::VectorXd x = seq.rows.row(row).transpose();
        const Eigen::VectorXd z = p.W * x + p.U * tr.h.col(t) + p.b;

        tr.gate_i.col(t) = sigmoid(z.segment(kInput * hidden, hidden).array());
        tr.gate_f.col(t) = sigmoid(z.segment(kForget * hidden, hidden).array());
        tr.gate_g.col(t) = z.segment(kCandidate * hidden, hidden).array().tanh();
        tr.gate_o.col(t) = sigmoid(z.segment(kOutput * hidden, hidden).array());

        tr.c.col(t) = tr.gate_f.col(t).cwiseProduct(c_prev) +
                      tr.gate_i.col(t).cwiseProduct(tr.gate_g.col(t));
        tr.tanh_c.col(t) = tr.c.col(t).array().tanh();
        tr.h.col(t + 1) = tr.gate_o.col(t).cwiseProduct(tr.tanh_c.col(t));
        c_prev = tr.c.col(t);
    }
    return tr;
}

// Reverse sweep of one direction. d_final is dL/d(final h); parameter
// gradients are accumulated into grad.
void backprop_direction(const LstmDirectionParams& p, const FeatureSequence& seq, bool reversed,
                        const DirectionTrace& tr, const Eigen::VectorXd& d_final,
                        LstmDirectionParams& grad) {
    const Eigen::Index hidden = p.hidden();
    const Eigen::Index steps = seq.steps();

    Eigen::VectorXd dh = d_final;
    Eigen::VectorXd dc_carry = Eigen::VectorXd::Zero(hidden);
    Eigen::VectorXd dz(4 * hidden);

    for (Eigen::Index t = steps - 1; t >= 0; --t) {
        const auto i = tr.gate_i.col(t).array();
        const auto f = tr.gate_f.col(t).array();
        const auto g = tr.gate_g.col(t).array();
        const auto o = tr.gate_o.col(t).array();
        const auto tc = tr.tanh_c.col(t).array();

        const Eigen::ArrayXd d_o = dh.array() * tc;
        const Eigen::ArrayXd dc = dh.array() * o * (1.0 - tc * tc) + dc_carry.array();
        const Eigen::ArrayXd d_i = dc * g;
        const Eigen::ArrayXd d_g = dc * i;
        const Eigen::ArrayXd c_prev =
            t > 0 ? tr.c.col(t - 1).array() : Eigen::ArrayXd::Zero(hidden).eval();
        const Eigen::ArrayXd d_f = dc * c_prev;
        dc_carry = (dc * f).matrix();

        dz.segment(kInput * hidden, hidden) = (d_i * i * (1.0 - i)).matrix();
        dz.segment(kForget * hidden, hidden) = (d_f * f * (1.0 - f)).matrix();
        dz.segment(kCandidate * hidden, hidden) = (d_g * (1.0 - g * g)).matrix();
        dz.segment(kOutput * hidden, hidden) = (d_o * o * (1.0 - o)).matrix();

        const Eigen::Index row = reversed ? steps - 1 - t : t;
        grad.W.noalias() += dz * seq.rows.row(row);
        grad.U.noalias() += dz * tr.h.col(t).transpose();
        grad.b += dz;

        dh.noalias() = p.U.transpose() * dz;
    }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double shift = logits.maxCoeff();
    Eigen::VectorXd e = (logits.array() - shift).exp();
    return e / e.sum();
}

constexpr double kProbFloor = 1e-12;
constexpr std::uint64_t kShuffleStream = 1;

// Flat views over the eight parameter blocks, declared order.
template <typename Model>
std::array<Eigen::Map<Eigen::ArrayXd>, 8> block_views(Model& m) {
    return {
        Eigen::Map<Eigen::ArrayXd>(m.fwd.W.data(), m.fwd.W.size()),
        Eigen::Map<Eigen::ArrayXd>(m.fwd.U.data(), m.fwd.U.size()),
        Eigen::Map<Eigen::ArrayXd>(m.fwd.b.data(), m.fwd.b.size()),
        Eigen::Map<Eigen::ArrayXd>(m.bwd.W.data(), m.bwd.W.size()),
        Eigen::Map<Eigen::ArrayXd>(m.bwd.U.data(), m.bwd.U.size()),
        Eigen::Map<Eigen::ArrayXd>(m.bwd.b.data(), m.bwd.b.size()),
        Eigen::Map<Eigen::ArrayXd>(m.fc_w.data(), m.fc_w.size()),
        Eigen::Map<Eigen::ArrayXd>(m.fc_b.data(), m.fc_b.size()),
    };
}

LstmDirectionParams zero_direction(Eigen::Index features, Eigen::Index hidden) {
    LstmDirectionParams p;
    p.W = Eigen::MatrixXd::Zero(4 * hidden, features);
    p.U = Eigen::MatrixXd::Zero(4 * hidden, hidden);
    p.b = Eigen::VectorXd::Zero(4 * hidden);
    return p;
}

void fill_uniform(Eigen::MatrixXd& m, Rng& rng, double scale) {
    // Row-major fill order, fixed so a seed pins every entry.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = rng.uniform(-scale, scale);
        }
    }
}

}  // namespace

void BiLstmClassifier::validate() const {
    const Eigen::Index h = hidden();
    const Eigen::Index f = features();
    const Eigen::Index k = classes();
    if (h < 1 || f < 1) {
        throw ShapeMismatch("model needs positive hidden and feature sizes");
    }
    if (fwd.W.rows() != 4 * h || fwd.U.rows() != 4 * h || fwd.b.size() != 4 * h ||
        bwd.W.rows() != 4 * h || bwd.U.rows() != 4 * h || bwd.b.size() != 4 * h ||
        bwd.W.cols() != f || bwd.U.cols() != h) {
        throw ShapeMismatch("direction parameter shapes are inconsistent");
    }
    if (k < 2 || fc_w.rows() != k || fc_w.cols() != 2 * h) {
        throw ShapeMismatch("fully connected layer shape is inconsistent");
    }
    if (class_vocab.size() != static_cast<std::size_t>(k)) {
        throw ShapeMismatch("class vocabulary size does not match output count");
    }
}

BiLstmClassifier BiLstmClassifier::initialized(Eigen::Index features, Eigen::Index hidden,
                                               std::vector<std::string> class_vocab,
                                               std::uint64_t seed) {
    if (class_vocab.size() < 2) {
        throw ShapeMismatch("classifier needs at least 2 classes");
    }
    const auto k = static_cast<Eigen::Index>(class_vocab.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));

    BiLstmClassifier m;
    m.class_vocab = std::move(class_vocab);
    m.fwd = zero_direction(features, hidden);
    m.bwd = zero_direction(features, hidden);
    m.fc_w = Eigen::MatrixXd::Zero(k, 2 * hidden);
    m.fc_b = Eigen::VectorXd::Zero(k);

    Rng rng(seed);
    fill_uniform(m.fwd.W, rng, scale);
    fill_uniform(m.fwd.U, rng, scale);
    fill_uniform(m.bwd.W, rng, scale);
    fill_uniform(m.bwd.U, rng, scale);
    fill_uniform(m.fc_w, rng, scale);
    // Forget-gate bias starts open so early training does not wipe the cell
    // state; all other biases start at zero.
    m.fwd.b.segment(kForget * hidden, hidden).setOnes();
    m.bwd.b.segment(kForget * hidden, hidden).setOnes();

    m.validate();
    return m;
}

ParamBlocks ParamBlocks::zeros_like(const BiLstmClassifier& model) {
    ParamBlocks p;
    p.fwd = zero_direction(model.features(), model.hidden());
    p.bwd = zero_direction(model.features(), model.hidden());
    p.fc_w = Eigen::MatrixXd::Zero(model.fc_w.rows(), model.fc_w.cols());
    p.fc_b = Eigen::VectorXd::Zero(model.fc_b.size());
    return p;
}

Eigen::VectorXd forward(const BiLstmClassifier& model, const FeatureSequence& seq) {
    if (seq.dim() != model.features()) {
        throw ShapeMismatch("sequence row length " + std::to_string(seq.dim()) +
                            " does not match model input size " +
                            std::to_string(model.features()));
    }
    if (seq.steps() < 1) {
        throw ShapeMismatch("sequence is empty");
    }
    const DirectionTrace fwd_tr = run_direction(model.fwd, seq, false);
    const DirectionTrace bwd_tr = run_direction(model.bwd, seq, true);

    Eigen::VectorXd hcat(2 * model.hidden());
    hcat << fwd_tr.final_h(), bwd_tr.final_h();
    return softmax(model.fc_w * hcat + model.fc_b);
}

double loss(const Eigen::VectorXd& probs, std::size_t label) {
    if (label >= static_cast<std::size_t>(probs.size())) {
        throw IndexOutOfRange("label index out of range");
    }
    return -std::log(std::max(probs(static_cast<Eigen::Index>(label)), kProbFloor));
}

ParamBlocks backward(const BiLstmClassifier& model, const FeatureSequence& seq,
                     std::size_t label, double* loss_out) {
    if (seq.dim() != model.features()) {
        throw ShapeMismatch("sequence row length does not match model input size");
    }
    if (seq.steps() < 1) {
        throw ShapeMismatch("sequence is empty");
    }
    if (label >= static_cast<std::size_t>(model.classes())) {
        throw IndexOutOfRange("label index out of range");
    }

    const Eigen::Index hidden = model.hidden();
    const DirectionTrace fwd_tr = run_direction(model.fwd, seq, false);
    const DirectionTrace bwd_tr = run_direction(model.bwd, seq, true);

    Eigen::VectorXd hcat(2 * hidden);
    hcat << fwd_tr.final_h(), bwd_tr.final_h();
    const Eigen::VectorXd probs = softmax(model.fc_w * hcat + model.fc_b);
    if (loss_out) {
        *loss_out = loss(probs, label);
    }

    // Softmax + cross-entropy collapse to probs - onehot at the logits.
    Eigen::VectorXd dlogits = probs;
    dlogits(static_cast<Eigen::Index>(label)) -= 1.0;

    ParamBlocks grad = ParamBlocks::zeros_like(model);
    grad.fc_b = dlogits;
    grad.fc_w.noalias() = dlogits * hcat.transpose();

    const Eigen::VectorXd dhcat = model.fc_w.transpose() * dlogits;
    backprop_direction(model.fwd, seq, false, fwd_tr, dhcat.head(hidden), grad.fwd);
    backprop_direction(model.bwd, seq, true, bwd_tr, dhcat.tail(hidden), grad.bwd);
    return grad;
}

std::size_t predict(const BiLstmClassifier& model, const FeatureSequence& seq) {
    const Eigen::VectorXd probs = forward(model, seq);
    // Ties break toward the lowest class index.
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < probs.size(); ++k) {
        if (probs(k) > probs(best)) {
            best = k;
        }
    }
    return static_cast<std::size_t>(best);
}

TrainResult train(const BiLstmClassifier& initial, const Dataset& ds, const TrainConfig& cfg) {
    if (ds.size() == 0) {
        throw EmptyDataset("cannot train on an empty dataset");
    }
    ds.validate();
    initial.validate();
    if (ds.feature_dim() != initial.features()) {
        throw ShapeMismatch("dataset feature width does not match the model");
    }
    if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate >= 0.0)) {
        throw ConfigError("train config: epochs and batch_size must be >= 1, learning_rate >= 0");
    }

    TrainResult result;
    result.model = initial;
    result.epoch_mean_loss.reserve(cfg.epochs);

    ParamBlocks m_state = ParamBlocks::zeros_like(initial);
    ParamBlocks v_state = ParamBlocks::zeros_like(initial);
    long long step = 0;

    // The shuffle stream is decoupled from the init stream so that models
    // initialized and trained from the same seed do not reuse draws.
    Rng shuffle_rng(Rng::stream_seed(cfg.seed, kShuffleStream));
    std::vector<std::size_t> order(ds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            ParamBlocks grad_sum = ParamBlocks::zeros_like(result.model);
            auto sum_views = block_views(grad_sum);

            // Sequential accumulation in shuffled order; the reduction order
            // is part of the determinism contract.
            for (std::size_t pos = start; pos < end; ++pos) {
                const std::size_t item = order[pos];
                double sample_loss = 0.0;
                ParamBlocks g = backward(result.model, ds.items[item], ds.labels[item],
                                         &sample_loss);
                epoch_loss += sample_loss;
                auto g_views = block_views(g);
                for (std::size_t b = 0; b < sum_views.size(); ++b) {
                    sum_views[b] += g_views[b];
                }
            }

            const double inv_batch = 1.0 / static_cast<double>(end - start);
            ++step;
            const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));

            auto model_views = block_views(result.model);
            auto m_views = block_views(m_state);
            auto v_views = block_views(v_state);
            for (std::size_t b = 0; b < model_views.size(); ++b) {
                const Eigen::ArrayXd g = sum_views[b] * inv_batch;
                m_views[b] = cfg.adam_beta1 * m_views[b] + (1.0 - cfg.adam_beta1) * g;
                v_views[b] = cfg.adam_beta2 * v_views[b] + (1.0 - cfg.adam_beta2) * g.square();
                model_views[b] -= cfg.learning_rate * (m_views[b] / bias1) /
                                  ((v_views[b] / bias2).sqrt() + cfg.adam_eps);
            }
        }
        result.epoch_mean_loss.push_back(epoch_loss / static_cast<double>(ds.size()));
    }
    return result;
}

void save_checkpoint(const std::filesystem::path& path, const BiLstmClassifier& model) {
    model.validate();
    auto os = detail::open_for_write(path);
    detail::put_bytes(os, kCheckpointMagic, 4);
    detail::put_u16(os, kCheckpointVersion);
    detail::put_u32(os, static_cast<std::uint32_t>(model.features()));
    detail::put_u32(os, static_cast<std::uint32_t>(model.hidden()));
    detail::put_u32(os, static_cast<std::uint32_t>(model.classes()));
    for (const auto& name : model.class_vocab) {
        detail::put_str16(os, name);
    }
    const auto put_matrix = [&os](const Eigen::MatrixXd& m) {
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                detail::put_f64(os, m(r, c));
            }
        }
    };
    const auto put_vector = [&os](const Eigen::VectorXd& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            detail::put_f64(os, v(i));
        }
    };
    put_matrix(model.fwd.W);
    put_matrix(model.fwd.U);
    put_vector(model.fwd.b);
    put_matrix(model.bwd.W);
    put_matrix(model.bwd.U);
    put_vector(model.bwd.b);
    put_matrix(model.fc_w);
    put_vector(model.fc_b);
    os.flush();
    if (!os) {
        throw Error("write failed: " + path.string());
    }
}

BiLstmClassifier load_checkpoint(const std::filesystem::path& path) {
    auto is = detail::open_for_read(path);
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
        throw BadMagic("not a model checkpoint: " + path.string());
    }
    detail::Reader rd(is);
    const std::uint16_t version = rd.u16();
    if (version != kCheckpointVersion) {
        throw Error("unsupported checkpoint version " + std::to_string(version));
    }
    const auto features = static_cast<Eigen::Index>(rd.u32());
    const auto hidden = static_cast<Eigen::Index>(rd.u32());
    const auto classes = static_cast<Eigen::Index>(rd.u32());

    BiLstmClassifier model;
    for (Eigen::Index k = 0; k < classes; ++k) {
        model.class_vocab.push_back(rd.str16());
    }
    const auto get_matrix = [&rd](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) {
                m(r, c) = rd.f64();
            }
        }
        return m;
    };
    const auto get_vector = [&rd](Eigen::Index n) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v(i) = rd.f64();
        }
        return v;
    };
    model.fwd.W = get_matrix(4 * hidden, features);
    model.fwd.U = get_matrix(4 * hidden, hidden);
    model.fwd.b = get_vector(4 * hidden);
    model.bwd.W = get_matrix(4 * hidden, features);
    model.bwd.U = get_matrix(4 * hidden, hidden);
    model.bwd.b = get_vector(4 * hidden);
    model.fc_w = get_matrix(classes, 2 * hidden);
    model.fc_b = get_vector(classes);
    model.validate();
    return model;
}

}  // namespace eegclf
