#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eegclf/recording.hpp"

namespace eegclf {

// One fixed-length window of a recording, all channels, with the labels of
// the span it was cut from. All trials cut with the same parameters share an
// identical shape.
struct Trial {
    std::size_t index = 0;    // position within its span's trial sequence
    Eigen::MatrixXd samples;  // channels x trial_len_samples, microvolts
    double sample_rate_hz = 0.0;
    std::map<std::string, std::string> labels;
};

// Window arithmetic, exposed separately so tests and callers can reason about
// counts without materializing trials.
std::size_t trial_length_samples(double trial_len_s, double sample_rate_hz);

// hop = round(trial_len_samples * (1 - overlap_frac)); throws ZeroHop when the
// hop rounds to zero samples.
std::size_t hop_in_samples(std::size_t trial_len_samples, double overlap_frac);

// floor((span_len - trial_len) / hop) + 1; requires span_len >= trial_len.
std::size_t trial_count(std::size_t span_len_samples, std::size_t trial_len_samples,
                        std::size_t hop_samples);

// Cuts the span into fixed-duration, overlapping trials. Trial k starts at
// span_start + k * hop; a trailing window that does not fit is discarded, not
// padded. Throws SpanTooShort, ZeroHop.
std::vector<Trial> segment(const Recording& r, const LabelSpan& span, double trial_len_s,
                           double overlap_frac);

}  // namespace eegclf
