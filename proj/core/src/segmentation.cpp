#include "eegclf/segmentation.hpp"

#include <cmath>

#include "eegclf/errors.hpp"

namespace eegclf {

std::size_t trial_length_samples(double trial_len_s, double sample_rate_hz) {
    if (!(trial_len_s > 0.0) || !(sample_rate_hz > 0.0)) {
        throw Error("trial length and sample rate must be positive");
    }
    const auto n = static_cast<long long>(std::llround(trial_len_s * sample_rate_hz));
    if (n < 2) {
        throw Error("trial length rounds to fewer than 2 samples");
    }
    return static_cast<std::size_t>(n);
}

std::size_t hop_in_samples(std::size_t trial_len_samples, double overlap_frac) {
    if (!(overlap_frac >= 0.0) || !(overlap_frac < 1.0)) {
        throw ZeroHop("overlap fraction must lie in [0, 1)");
    }
    const auto hop = static_cast<long long>(
        std::llround(static_cast<double>(trial_len_samples) * (1.0 - overlap_frac)));
    if (hop < 1) {
        throw ZeroHop("overlap so close to 1 that the hop rounds to 0 samples");
    }
    return static_cast<std::size_t>(hop);
}

std::size_t trial_count(std::size_t span_len_samples, std::size_t trial_len_samples,
                        std::size_t hop_samples) {
    if (span_len_samples < trial_len_samples) {
        throw SpanTooShort("span is shorter than one trial");
    }
    return (span_len_samples - trial_len_samples) / hop_samples + 1;
}

std::vector<Trial> segment(const Recording& r, const LabelSpan& span, double trial_len_s,
                           double overlap_frac) {
    span.validate();
    const std::size_t trial_len = trial_length_samples(trial_len_s, r.sample_rate_hz);
    const std::size_t hop = hop_in_samples(trial_len, overlap_frac);

    const auto span_start = static_cast<long long>(std::llround(span.start_s * r.sample_rate_hz));
    const auto span_end = static_cast<long long>(std::llround(span.end_s * r.sample_rate_hz));
    if (span_start < 0 || span_end > static_cast<long long>(r.sample_count())) {
        throw Error("label span does not fit inside the recording");
    }
    const auto span_len = static_cast<std::size_t>(span_end - span_start);
    const std::size_t count = trial_count(span_len, trial_len, hop);

    std::vector<Trial> trials;
    trials.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Trial t;
        t.index = k;
        t.sample_rate_hz = r.sample_rate_hz;
        t.labels = span.labels;
        const auto start = static_cast<Eigen::Index>(span_start + static_cast<long long>(k * hop));
        t.samples = r.samples.middleCols(start, static_cast<Eigen::Index>(trial_len));
        trials.push_back(std::move(t));
    }
    return trials;
}

}  // namespace eegclf
