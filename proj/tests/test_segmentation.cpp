#include <doctest.h>

#include "eegclf/errors.hpp"
#include "eegclf/segmentation.hpp"
#include "testutil.hpp"

using namespace eegclf;

namespace {

Recording recording_with_span(Rng& rng, std::size_t channels, double rate, double span_s,
                              LabelSpan& span_out) {
    Recording r = testutil::random_recording(
        rng, channels, static_cast<std::size_t>(std::llround(span_s * rate)), rate);
    span_out.start_s = 0.0;
    span_out.end_s = span_s;
    span_out.labels = {{"audio_type", "M"}};
    r.spans = {span_out};
    return r;
}

}  // namespace

TEST_CASE("30 s at 2500 Hz, 400 ms trials, 50% overlap -> 149 trials") {
    CHECK(trial_length_samples(0.4, 2500.0) == 1000);
    CHECK(hop_in_samples(1000, 0.5) == 500);
    CHECK(trial_count(75000, 1000, 500) == 149);
    CHECK(testutil::enumerate_window_starts(75000, 1000, 500) == 149);

    Rng rng(21);
    LabelSpan span;
    const Recording r = recording_with_span(rng, 3, 2500.0, 30.0, span);
    const auto trials = segment(r, span, 0.4, 0.5);
    CHECK(trials.size() == 149);
    CHECK(trials.front().samples.cols() == 1000);
}

TEST_CASE("5 s at 2500 Hz, 1 s trials, 50% overlap -> 9 trials") {
    CHECK(trial_length_samples(1.0, 2500.0) == 2500);
    CHECK(hop_in_samples(2500, 0.5) == 1250);
    CHECK(trial_count(12500, 2500, 1250) == 9);
    CHECK(testutil::enumerate_window_starts(12500, 2500, 1250) == 9);
}

TEST_CASE("count formula matches start enumeration for random geometries") {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        const std::size_t trial_len = 2 + rng.bounded(500);
        const std::size_t span_len = trial_len + rng.bounded(5000);
        const std::size_t hop = 1 + rng.bounded(trial_len);
        CHECK(trial_count(span_len, trial_len, hop) ==
              testutil::enumerate_window_starts(span_len, trial_len, hop));
    }
}

TEST_CASE("a span exactly one trial long yields exactly that trial") {
    Rng rng(23);
    LabelSpan span;
    const Recording r = recording_with_span(rng, 2, 1000.0, 0.5, span);
    for (const double overlap : {0.0, 0.25, 0.5, 0.9}) {
        const auto trials = segment(r, span, 0.5, overlap);
        REQUIRE(trials.size() == 1);
        CHECK(trials[0].samples == r.samples);
    }
}

TEST_CASE("spans shorter than a trial raise SpanTooShort") {
    Rng rng(24);
    LabelSpan span;
    const Recording r = recording_with_span(rng, 2, 1000.0, 0.3, span);
    CHECK_THROWS_AS(segment(r, span, 0.5, 0.5), SpanTooShort);
}

TEST_CASE("overlap rounding the hop to zero raises ZeroHop") {
    CHECK_THROWS_AS(hop_in_samples(10, 0.96), ZeroHop);
    CHECK_THROWS_AS(hop_in_samples(1000, 1.0), ZeroHop);
    CHECK_THROWS_AS(hop_in_samples(1000, -0.1), ZeroHop);
    CHECK(hop_in_samples(10, 0.94) == 1);
}

TEST_CASE("consecutive trials at 50% overlap share exactly half") {
    Rng rng(25);
    LabelSpan span;
    const Recording r = recording_with_span(rng, 4, 2500.0, 2.0, span);
    const auto trials = segment(r, span, 0.4, 0.5);
    REQUIRE(trials.size() >= 2);
    const Eigen::Index half = trials[0].samples.cols() / 2;
    for (std::size_t k = 0; k + 1 < trials.size(); ++k) {
        CHECK(trials[k].samples.rightCols(half) == trials[k + 1].samples.leftCols(half));
    }
}

TEST_CASE("trial starts form an arithmetic sequence inside the span") {
    Rng rng(26);
    LabelSpan span;
    span.start_s = 1.0;
    span.end_s = 9.0;
    span.labels = {{"audio_type", "V"}};
    Recording r = testutil::random_recording(rng, 3, 10000, 1000.0);
    r.spans = {span};

    const double trial_len_s = 0.5;
    const double overlap = 0.25;
    const auto trials = segment(r, span, trial_len_s, overlap);
    const std::size_t trial_len = trial_length_samples(trial_len_s, r.sample_rate_hz);
    const std::size_t hop = hop_in_samples(trial_len, overlap);
    const std::size_t span_start = 1000;

    for (std::size_t k = 0; k < trials.size(); ++k) {
        CHECK(trials[k].index == k);
        CHECK(trials[k].labels == span.labels);
        const auto start = static_cast<Eigen::Index>(span_start + k * hop);
        // Every emitted sample lies inside the span, sample-exact.
        CHECK(start + static_cast<Eigen::Index>(trial_len) <= 9000);
        CHECK(trials[k].samples ==
              r.samples.middleCols(start, static_cast<Eigen::Index>(trial_len)));
    }
}
