#include <doctest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "eegclf/bilstm.hpp"
#include "eegclf/errors.hpp"
#include "testutil.hpp"

using namespace eegclf;

namespace {

// ---- independent scalar-loop oracle --------------------------------------
// A from-first-principles re-implementation of the forward pass: plain
// std::vector loops, no shared code with the implementation under test
// beyond reading the parameter values.

double o_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> oracle_direction(const LstmDirectionParams& p, const Eigen::MatrixXd& seq,
                                     bool reversed) {
    const auto hidden = static_cast<std::size_t>(p.hidden());
    const auto features = static_cast<std::size_t>(p.features());
    const auto steps = static_cast<std::size_t>(seq.rows());

    std::vector<double> h(hidden, 0.0), c(hidden, 0.0);
    for (std::size_t step = 0; step < steps; ++step) {
        const std::size_t row = reversed ? steps - 1 - step : step;
        std::vector<double> z(4 * hidden, 0.0);
        for (std::size_t g = 0; g < 4 * hidden; ++g) {
            double acc = p.b(static_cast<Eigen::Index>(g));
            for (std::size_t f = 0; f < features; ++f) {
                acc += p.W(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(f)) *
                       seq(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(f));
            }
            for (std::size_t j = 0; j < hidden; ++j) {
                acc += p.U(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(j)) * h[j];
            }
            z[g] = acc;
        }
        std::vector<double> h_new(hidden), c_new(hidden);
        for (std::size_t j = 0; j < hidden; ++j) {
            const double gi = o_sigmoid(z[j]);
            const double gf = o_sigmoid(z[hidden + j]);
            const double gg = std::tanh(z[2 * hidden + j]);
            const double go = o_sigmoid(z[3 * hidden + j]);
            c_new[j] = gf * c[j] + gi * gg;
            h_new[j] = go * std::tanh(c_new[j]);
        }
        h = h_new;
        c = c_new;
    }
    return h;
}

std::vector<double> oracle_forward(const BiLstmClassifier& m, const FeatureSequence& seq) {
    const auto hidden = static_cast<std::size_t>(m.hidden());
    const auto classes = static_cast<std::size_t>(m.classes());
    const auto hf = oracle_direction(m.fwd, seq.rows, false);
    const auto hb = oracle_direction(m.bwd, seq.rows, true);

    std::vector<double> logits(classes);
    for (std::size_t k = 0; k < classes; ++k) {
        double acc = m.fc_b(static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < hidden; ++j) {
            acc += m.fc_w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * hf[j];
            acc += m.fc_w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(hidden + j)) *
                   hb[j];
        }
        logits[k] = acc;
    }
    double shift = logits[0];
    for (const double l : logits) shift = std::max(shift, l);
    double sum = 0.0;
    std::vector<double> probs(classes);
    for (std::size_t k = 0; k < classes; ++k) {
        probs[k] = std::exp(logits[k] - shift);
        sum += probs[k];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

// ---------------------------------------------------------------------------

// Pointers to every parameter, declared block order; works for the model and
// for gradient blocks alike because the field names match.
template <typename M>
std::vector<double*> flat_params(M& m) {
    std::vector<double*> out;
    const auto push = [&out](auto& mat) {
        for (Eigen::Index i = 0; i < mat.size(); ++i) {
            out.push_back(mat.data() + i);
        }
    };
    push(m.fwd.W);
    push(m.fwd.U);
    push(m.fwd.b);
    push(m.bwd.W);
    push(m.bwd.U);
    push(m.bwd.b);
    push(m.fc_w);
    push(m.fc_b);
    return out;
}

BiLstmClassifier zero_model(Eigen::Index features, Eigen::Index hidden,
                            std::vector<std::string> vocab) {
    BiLstmClassifier m = BiLstmClassifier::initialized(features, hidden, std::move(vocab), 0);
    for (double* p : flat_params(m)) {
        *p = 0.0;
    }
    return m;
}

FeatureSequence random_sequence(Rng& rng, Eigen::Index steps, Eigen::Index dim) {
    FeatureSequence seq;
    seq.rows.resize(steps, dim);
    for (Eigen::Index r = 0; r < steps; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            seq.rows(r, c) = rng.uniform(-2.0, 2.0);
        }
    }
    return seq;
}

// Central finite differences against the analytic gradient. Relative error
// uses a 1e-3 scale floor so structurally tiny gradients compare against an
// absolute tolerance of ~1e-7 instead of dividing noise by noise.
double max_gradcheck_error(const BiLstmClassifier& model, const FeatureSequence& seq,
                           std::size_t label) {
    BiLstmClassifier probe = model;
    const ParamBlocks analytic = backward(probe, seq, label);

    ParamBlocks analytic_copy = analytic;  // non-const for flat_params
    const auto grads = flat_params(analytic_copy);
    const auto params = flat_params(probe);
    REQUIRE(grads.size() == params.size());

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + h;
        const double up = loss(forward(probe, seq), label);
        *params[i] = saved - h;
        const double down = loss(forward(probe, seq), label);
        *params[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        worst = std::max(worst, testutil::rel_err(*grads[i], numeric, 1e-3));
    }
    return worst;
}

}  // namespace

TEST_CASE("all-zero parameters give uniform probabilities") {
    Rng rng(51);
    const BiLstmClassifier m = zero_model(3, 4, {"a", "b"});
    const FeatureSequence seq = random_sequence(rng, 5, 3);
    const Eigen::VectorXd probs = forward(m, seq);
    CHECK(probs(0) == 0.5);
    CHECK(probs(1) == 0.5);

    const BiLstmClassifier m4 = zero_model(3, 4, {"a", "b", "c", "d"});
    const Eigen::VectorXd probs4 = forward(m4, seq);
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(probs4(k) == doctest::Approx(0.25).epsilon(1e-15));
    }
}

TEST_CASE("forward matches the scalar-loop oracle to 1e-12") {
    Rng rng(52);
    for (int draw = 0; draw < 20; ++draw) {
        const BiLstmClassifier m =
            BiLstmClassifier::initialized(3, 4, {"a", "b"}, 1000 + draw);
        const FeatureSequence seq = random_sequence(rng, 5, 3);
        const Eigen::VectorXd probs = forward(m, seq);
        const auto oracle = oracle_forward(m, seq);
        for (Eigen::Index k = 0; k < probs.size(); ++k) {
            CHECK(std::abs(probs(k) - oracle[static_cast<std::size_t>(k)]) <= 1e-12);
        }
    }
}

TEST_CASE("forward output is a valid distribution") {
    Rng rng(53);
    for (int draw = 0; draw < 50; ++draw) {
        const Eigen::Index features = 2 + static_cast<Eigen::Index>(rng.bounded(6));
        const Eigen::Index steps = 1 + static_cast<Eigen::Index>(rng.bounded(8));
        const BiLstmClassifier m =
            BiLstmClassifier::initialized(features, 3, {"a", "b", "c"}, rng.next_u64());
        const Eigen::VectorXd probs = forward(m, random_sequence(rng, steps, features));
        double sum = 0.0;
        for (Eigen::Index k = 0; k < probs.size(); ++k) {
            CHECK(probs(k) > 0.0);
            CHECK(probs(k) < 1.0);
            sum += probs(k);
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("forward rejects mismatched input width") {
    Rng rng(54);
    const BiLstmClassifier m = BiLstmClassifier::initialized(4, 3, {"a", "b"}, 9);
    CHECK_THROWS_AS(forward(m, random_sequence(rng, 5, 3)), ShapeMismatch);
}

TEST_CASE("cross-entropy loss fixed points") {
    Eigen::VectorXd probs(2);
    probs << 1.0 - 1e-15, 1e-15;
    CHECK(loss(probs, 0) == doctest::Approx(0.0).epsilon(1e-9));

    Eigen::VectorXd uniform4 = Eigen::VectorXd::Constant(4, 0.25);
    CHECK(loss(uniform4, 2) == doctest::Approx(std::log(4.0)).epsilon(1e-12));

    Eigen::VectorXd skew(2);
    skew << 0.9, 0.1;
    CHECK(loss(skew, 1) == doctest::Approx(-std::log(0.1)).epsilon(1e-12));

    // The floor keeps a zero probability finite.
    Eigen::VectorXd degenerate(2);
    degenerate << 1.0, 0.0;
    CHECK(std::isfinite(loss(degenerate, 1)));
    CHECK_THROWS_AS(loss(skew, 5), IndexOutOfRange);
}

TEST_CASE("fc bias gradient is probs minus onehot") {
    Rng rng(55);
    const BiLstmClassifier m = zero_model(3, 4, {"a", "b"});
    const FeatureSequence seq = random_sequence(rng, 5, 3);
    const ParamBlocks g = backward(m, seq, 1);
    CHECK(g.fc_b(0) == 0.5);
    CHECK(g.fc_b(1) == -0.5);
}

TEST_CASE("recurrent weights get exactly zero gradient on length-1 sequences") {
    Rng rng(56);
    const BiLstmClassifier m = BiLstmClassifier::initialized(3, 4, {"a", "b"}, 77);
    const FeatureSequence seq = random_sequence(rng, 1, 3);
    const ParamBlocks g = backward(m, seq, 0);
    // No prior hidden state exists, so every hidden-to-gate weight (the
    // forget block included) is unused.
    CHECK(g.fwd.U.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.bwd.U.cwiseAbs().maxCoeff() == 0.0);
    CHECK(g.fwd.W.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(57);
    for (int draw = 0; draw < 10; ++draw) {
        const BiLstmClassifier m =
            BiLstmClassifier::initialized(3, 4, {"a", "b"}, 4000 + draw);
        const FeatureSequence seq = random_sequence(rng, 5, 3);
        const std::size_t label = rng.bounded(2);
        CHECK(max_gradcheck_error(m, seq, label) <= 1e-4);
    }
}

namespace {

// Two-class dataset with well-separated antisymmetric feature matrices.
Dataset separable_dataset(Rng& rng, std::size_t per_class, Eigen::Index c, double noise) {
    Eigen::MatrixXd base0 = Eigen::MatrixXd::Zero(c, c);
    Eigen::MatrixXd base1 = Eigen::MatrixXd::Zero(c, c);
    for (Eigen::Index i = 0; i < c; ++i) {
        for (Eigen::Index j = i + 1; j < c; ++j) {
            const double v0 = rng.uniform(-10.0, 10.0);
            const double v1 = rng.uniform(-10.0, 10.0);
            base0(i, j) = v0;
            base0(j, i) = -v0;
            base1(i, j) = v1;
            base1(j, i) = -v1;
        }
    }
    Dataset ds;
    ds.class_vocab = {"M", "V"};
    for (std::size_t i = 0; i < 2 * per_class; ++i) {
        const std::size_t label = i % 2;
        FeatureSequence seq;
        seq.rows = label == 0 ? base0 : base1;
        for (Eigen::Index r = 0; r < c; ++r) {
            for (Eigen::Index col = 0; col < c; ++col) {
                seq.rows(r, col) += rng.uniform(-noise, noise);
            }
        }
        ds.items.push_back(std::move(seq));
        ds.labels.push_back(label);
    }
    return ds;
}

}  // namespace

TEST_CASE("training on a separable set strictly decreases the epoch loss") {
    Rng rng(58);
    const Dataset ds = separable_dataset(rng, 16, 6, 0.5);
    const BiLstmClassifier initial = BiLstmClassifier::initialized(6, 4, ds.class_vocab, 99);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 99;
    cfg.batch_size = 8;
    const TrainResult result = train(initial, ds, cfg);
    REQUIRE(result.epoch_mean_loss.size() == 5);
    for (std::size_t e = 1; e < 5; ++e) {
        CHECK(result.epoch_mean_loss[e] < result.epoch_mean_loss[e - 1]);
    }

    // The trained model separates held-out-ish samples of the same clusters.
    Rng fresh(580);
    const Dataset probe = separable_dataset(rng, 4, 6, 0.5);
    (void)fresh;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < probe.size(); ++i) {
        hits += predict(result.model, probe.items[i]) == probe.labels[i] ? 1 : 0;
    }
    CHECK(hits >= probe.size() - 1);
}

TEST_CASE("zero learning rate leaves the parameters bitwise unchanged") {
    Rng rng(59);
    const Dataset ds = separable_dataset(rng, 4, 4, 0.5);
    BiLstmClassifier initial = BiLstmClassifier::initialized(4, 3, ds.class_vocab, 5);
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.learning_rate = 0.0;
    cfg.seed = 5;
    TrainResult result = train(initial, ds, cfg);
    const auto before = flat_params(initial);
    const auto after = flat_params(result.model);
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(*before[i] == *after[i]);
    }
}

TEST_CASE("training is bitwise deterministic in the seed") {
    Rng rng(60);
    const Dataset ds = separable_dataset(rng, 6, 4, 0.5);
    const BiLstmClassifier initial = BiLstmClassifier::initialized(4, 3, ds.class_vocab, 7);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 42;
    TrainResult a = train(initial, ds, cfg);
    TrainResult b = train(initial, ds, cfg);
    CHECK(a.epoch_mean_loss == b.epoch_mean_loss);
    const auto pa = flat_params(a.model);
    const auto pb = flat_params(b.model);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(*pa[i] == *pb[i]);
    }
}

TEST_CASE("train rejects an empty dataset") {
    Dataset ds;
    ds.class_vocab = {"a", "b"};
    const BiLstmClassifier m = BiLstmClassifier::initialized(3, 2, ds.class_vocab, 0);
    CHECK_THROWS_AS(train(m, ds, TrainConfig{}), EmptyDataset);
}

TEST_CASE("predict takes the argmax with lowest-index tie-break") {
    Rng rng(61);
    BiLstmClassifier m = zero_model(3, 4, {"a", "b", "c"});
    const FeatureSequence seq = random_sequence(rng, 2, 3);

    // Zero weights leave the logits equal to the fc biases.
    m.fc_b << std::log(0.1), std::log(0.7), std::log(0.2);
    const Eigen::VectorXd probs = forward(m, seq);
    CHECK(probs(0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(probs(1) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(probs(2) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(predict(m, seq) == 1);

    BiLstmClassifier tie = zero_model(3, 4, {"a", "b"});
    CHECK(predict(tie, seq) == 0);
}

TEST_CASE("predict is invariant under a constant shift of the fc biases") {
    Rng rng(62);
    BiLstmClassifier m = BiLstmClassifier::initialized(4, 3, {"a", "b", "c"}, 17);
    const FeatureSequence seq = random_sequence(rng, 4, 4);
    const std::size_t before = predict(m, seq);
    m.fc_b.array() += 123.0;
    CHECK(predict(m, seq) == before);
}

TEST_CASE("checkpoints round-trip bitwise") {
    testutil::TempDir dir("ckpt");
    const BiLstmClassifier m = BiLstmClassifier::initialized(6, 5, {"L", "B", "NL"}, 3);
    const auto p = dir.path() / "model.ckpt";
    save_checkpoint(p, m);
    BiLstmClassifier back = load_checkpoint(p);

    CHECK(back.class_vocab == m.class_vocab);
    BiLstmClassifier a = m;
    const auto pa = flat_params(a);
    const auto pb = flat_params(back);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(*pa[i] == *pb[i]);
    }
}

TEST_CASE("loading garbage as a checkpoint raises BadMagic") {
    testutil::TempDir dir("ckpt_bad");
    const auto p = dir.path() / "junk.ckpt";
    std::ofstream(p, std::ios::binary) << "not a checkpoint";
    CHECK_THROWS_AS(load_checkpoint(p), BadMagic);
}
