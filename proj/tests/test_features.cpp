#include <doctest.h>

#include <cmath>

#include "eegclf/errors.hpp"
#include "eegclf/features.hpp"
#include "testutil.hpp"

using namespace eegclf;

TEST_CASE("spectral energy equals the time-domain sum (Parseval)") {
    Rng rng(31);
    Fft fft;
    for (int i = 0; i < 60; ++i) {
        // Lengths deliberately include primes and odd sizes.
        const std::size_t len = 100 + rng.bounded(2901);
        const std::size_t channels = 1 + rng.bounded(4);
        const Trial t = testutil::random_trial(rng, channels, len);
        for (std::size_t m = 0; m < channels; ++m) {
            const double freq_domain = channel_energy(t, m, fft);
            const double time_domain =
                testutil::time_domain_energy(t.samples, static_cast<Eigen::Index>(m));
            CHECK(testutil::rel_err(freq_domain, time_domain) <= 1e-9);
        }
    }
}

TEST_CASE("constant and zero signals have the expected energy") {
    Fft fft;
    Trial t;
    t.sample_rate_hz = 2500.0;
    t.samples = Eigen::MatrixXd::Zero(2, 1000);
    t.samples.row(0).setOnes();

    CHECK(channel_energy(t, 0, fft) == doctest::Approx(1000.0).epsilon(1e-12));
    CHECK(channel_energy(t, 1, fft) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("dB conversion fixed points") {
    CHECK(energy_db(1.0) == 0.0);
    CHECK(energy_db(1e-6) == doctest::Approx(-60.0).epsilon(1e-12));
    CHECK(energy_db(1000.0) == doctest::Approx(30.0).epsilon(1e-12));
    CHECK_THROWS_AS(energy_db(-1.0), NegativeEnergy);
}

TEST_CASE("a silent channel clamps to the energy floor instead of -inf") {
    const double db = energy_db(0.0);
    CHECK(std::isfinite(db));
    CHECK(db == doctest::Approx(10.0 * std::log10(kEnergyFloor)));
}

TEST_CASE("energy vector composes per-channel energies") {
    Fft fft;
    Trial t;
    t.sample_rate_hz = 2500.0;
    // Channel energies 1, 10, 100 -> 0, 10, 20 dB.
    t.samples = Eigen::MatrixXd::Zero(3, 4);
    t.samples(0, 0) = 1.0;
    t.samples(1, 0) = std::sqrt(10.0);
    t.samples(2, 0) = 10.0;

    const EnergyVector ev = energy_vector(t, fft);
    REQUIRE(ev.values_db.size() == 3);
    CHECK(ev.values_db(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(ev.values_db(1) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(ev.values_db(2) == doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("identical channels give identical dB entries") {
    Rng rng(32);
    Fft fft;
    Trial t = testutil::random_trial(rng, 1, 500);
    Trial replicated;
    replicated.sample_rate_hz = t.sample_rate_hz;
    replicated.samples.resize(4, t.samples.cols());
    for (Eigen::Index c = 0; c < 4; ++c) {
        replicated.samples.row(c) = t.samples.row(0);
    }
    const EnergyVector ev = energy_vector(replicated, fft);
    for (Eigen::Index m = 1; m < 4; ++m) {
        CHECK(ev.values_db(m) == ev.values_db(0));
    }
}

TEST_CASE("energy vector equals an independent per-channel scalar loop") {
    Rng rng(33);
    Fft fft;
    const Trial t = testutil::random_trial(rng, 5, 777);
    const EnergyVector ev = energy_vector(t, fft);
    for (std::size_t m = 0; m < 5; ++m) {
        CHECK(ev.values_db(static_cast<Eigen::Index>(m)) ==
              energy_db(channel_energy(t, m, fft)));
    }
}

TEST_CASE("difference matrix of [0, 10, 20]") {
    EnergyVector ev;
    ev.values_db.resize(3);
    ev.values_db << 0.0, 10.0, 20.0;
    const EnergyDiffMatrix e = energy_diff_matrix(ev);
    Eigen::MatrixXd expected(3, 3);
    expected << 0, -10, -20, 10, 0, -10, 20, 10, 0;
    CHECK(e.m == expected);
    CHECK(e.kind == MatrixKind::Plain);
}

TEST_CASE("constant energy vector gives the zero matrix") {
    EnergyVector ev;
    ev.values_db = Eigen::VectorXd::Constant(5, 12.34);
    CHECK(energy_diff_matrix(ev).m.isZero(0.0));
}

TEST_CASE("difference matrices are exactly antisymmetric with zero diagonal") {
    Rng rng(34);
    for (int i = 0; i < 100; ++i) {
        EnergyVector ev;
        ev.values_db.resize(2 + static_cast<Eigen::Index>(rng.bounded(60)));
        for (Eigen::Index m = 0; m < ev.values_db.size(); ++m) {
            ev.values_db(m) = rng.uniform(-80.0, 80.0);
        }
        const EnergyDiffMatrix e = energy_diff_matrix(ev);
        // Transpose oracle: m + m^T must vanish bitwise, not approximately.
        CHECK((e.m + e.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
        CHECK(e.m.diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("a common positive gain cancels out of the difference matrix") {
    Rng rng(35);
    Fft fft;
    const Trial t = testutil::random_trial(rng, 6, 800);
    const EnergyDiffMatrix base = energy_diff_matrix(energy_vector(t, fft));
    for (const double gain : {0.001, 0.5, 3.0, 1000.0}) {
        Trial scaled = t;
        scaled.samples *= gain;
        const EnergyDiffMatrix e = energy_diff_matrix(energy_vector(scaled, fft));
        CHECK((e.m - base.m).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("permuting channels conjugates the difference matrix") {
    Rng rng(36);
    Fft fft;
    const Trial t = testutil::random_trial(rng, 5, 400);
    const EnergyDiffMatrix base = energy_diff_matrix(energy_vector(t, fft));

    std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
    Trial permuted = t;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        permuted.samples.row(static_cast<Eigen::Index>(i)) =
            t.samples.row(static_cast<Eigen::Index>(perm[i]));
    }
    const EnergyDiffMatrix e = energy_diff_matrix(energy_vector(permuted, fft));
    for (std::size_t i = 0; i < perm.size(); ++i) {
        for (std::size_t j = 0; j < perm.size(); ++j) {
            CHECK(e.m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
                  base.m(static_cast<Eigen::Index>(perm[i]), static_cast<Eigen::Index>(perm[j])));
        }
    }
}

namespace {

EnergyDiffMatrix random_plain(Rng& rng, Eigen::Index c) {
    EnergyVector ev;
    ev.values_db.resize(c);
    for (Eigen::Index m = 0; m < c; ++m) {
        ev.values_db(m) = rng.uniform(-80.0, 80.0);
    }
    return energy_diff_matrix(ev);
}

}  // namespace

TEST_CASE("derivative of a stationary pair is zero") {
    Rng rng(37);
    const EnergyDiffMatrix e = random_plain(rng, 4);
    CHECK(derivative_matrix(e, e).m.isZero(0.0));
}

TEST_CASE("derivative of (0, 2J) is J") {
    EnergyVector zero_ev, two_ev;
    zero_ev.values_db = Eigen::VectorXd::Zero(3);
    two_ev.values_db.resize(3);
    two_ev.values_db << 0.0, 2.0, 4.0;  // differences are 2x those of [0,1,2]
    EnergyVector one_ev;
    one_ev.values_db.resize(3);
    one_ev.values_db << 0.0, 1.0, 2.0;

    const EnergyDiffMatrix d =
        derivative_matrix(energy_diff_matrix(zero_ev), energy_diff_matrix(two_ev));
    CHECK(d.m == energy_diff_matrix(one_ev).m);
    CHECK(d.kind == MatrixKind::Derivative);
}

TEST_CASE("derivative equals the centered difference and the literal composition") {
    Rng rng(38);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Index c = 2 + static_cast<Eigen::Index>(rng.bounded(10));
        const EnergyDiffMatrix prev = random_plain(rng, c);
        const EnergyDiffMatrix mid = random_plain(rng, c);
        const EnergyDiffMatrix next = random_plain(rng, c);

        const EnergyDiffMatrix d = derivative_matrix(prev, next);
        // Centered difference identity holds bitwise.
        CHECK(d.m == ((next.m - prev.m) / 2.0).eval());
        // The unit-step two-difference composition agrees up to fp
        // re-association of the middle matrix.
        const Eigen::MatrixXd oracle = testutil::centered_derivative_oracle(prev.m, mid.m, next.m);
        CHECK((d.m - oracle).cwiseAbs().maxCoeff() <= 1e-12);
        // Antisymmetry survives the derivative.
        CHECK((d.m + d.m.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("derivative rejects mismatched kinds and shapes") {
    Rng rng(39);
    const EnergyDiffMatrix a = random_plain(rng, 4);
    const EnergyDiffMatrix b = random_plain(rng, 5);
    CHECK_THROWS_AS(derivative_matrix(a, b), ShapeMismatch);

    const EnergyDiffMatrix d = derivative_matrix(a, a);
    CHECK_THROWS_AS(derivative_matrix(d, a), KindMismatch);
}

TEST_CASE("featurize counts: plain keeps all trials, derivative drops the ends") {
    Rng rng(40);
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < 7; ++i) {
        Trial t = testutil::random_trial(rng, 4, 256);
        t.index = i;
        trials.push_back(std::move(t));
    }
    CHECK(featurize(trials, MatrixKind::Plain).size() == 7);
    CHECK(featurize(trials, MatrixKind::Derivative).size() == 5);

    const std::vector<Trial> one(trials.begin(), trials.begin() + 1);
    const auto single = featurize(one, MatrixKind::Plain);
    REQUIRE(single.size() == 1);
    CHECK(single[0].steps() == 4);
    CHECK(single[0].dim() == 4);

    const std::vector<Trial> two(trials.begin(), trials.begin() + 2);
    CHECK_THROWS_AS(featurize(two, MatrixKind::Derivative), TooFewTrials);
}

TEST_CASE("derivative sequences match per-trial matrices composed by hand") {
    Rng rng(41);
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < 5; ++i) {
        trials.push_back(testutil::random_trial(rng, 3, 128));
    }
    Fft fft;
    std::vector<EnergyDiffMatrix> plain;
    for (const auto& t : trials) {
        plain.push_back(energy_diff_matrix(energy_vector(t, fft)));
    }
    const auto seqs = featurize(trials, MatrixKind::Derivative);
    REQUIRE(seqs.size() == 3);
    for (std::size_t n = 1; n + 1 < plain.size(); ++n) {
        CHECK(seqs[n - 1].rows == derivative_matrix(plain[n - 1], plain[n + 1]).m);
    }
}

TEST_CASE("sequence axis selects rows or columns as timesteps") {
    Rng rng(42);
    const EnergyDiffMatrix e = random_plain(rng, 4);
    CHECK(to_sequence(e, SequenceAxis::Rows).rows == e.m);
    CHECK(to_sequence(e, SequenceAxis::Cols).rows == e.m.transpose().eval());
}

TEST_CASE("featurize output does not depend on the thread count") {
    Rng rng(43);
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < 20; ++i) {
        trials.push_back(testutil::random_trial(rng, 6, 500));
    }
    const auto sequential = featurize(trials, MatrixKind::Plain, SequenceAxis::Rows, 1);
    const auto parallel = featurize(trials, MatrixKind::Plain, SequenceAxis::Rows, 4);
    REQUIRE(sequential.size() == parallel.size());
    for (std::size_t i = 0; i < sequential.size(); ++i) {
        CHECK(sequential[i].rows == parallel[i].rows);
    }
}

TEST_CASE("featurize rejects inconsistent trial shapes") {
    Rng rng(44);
    std::vector<Trial> trials = {testutil::random_trial(rng, 3, 100),
                                 testutil::random_trial(rng, 3, 101)};
    CHECK_THROWS_AS(featurize(trials, MatrixKind::Plain), ShapeMismatch);
}
