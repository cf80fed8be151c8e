#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eegclf {

// Ordered electrode names. Order is significant: it fixes the row/column
// identity of every downstream energy-difference matrix, so no method here
// ever re-sorts.
struct ChannelLayout {
    std::vector<std::string> names;

    std::size_t count() const { return names.size(); }
    bool has(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws UnknownChannel

    // Throws Error if names are empty strings or duplicated.
    void validate() const;
};

// Closed label vocabularies, keyed by label kind as it appears in manifests.
//   audio_type: M, V
//   genre:      BA, CL, ME, RE
//   taste:      L, B, NL
//   language:   SP, EN, IT, GE, KO
//   known:      K, F, NK
const std::map<std::string, std::vector<std::string>>& label_vocabularies();

// Labeled time interval of a recording, seconds from recording start.
struct LabelSpan {
    double start_s = 0.0;
    double end_s = 0.0;
    std::map<std::string, std::string> labels;  // label kind -> value

    double duration_s() const { return end_s - start_s; }

    // Checks 0 <= start < end and that every label is drawn from the closed
    // vocabularies above.
    void validate() const;
};

// Multichannel time-domain recording. Samples are microvolts, one row per
// channel. Immutable by convention after load; nothing here mutates samples.
struct Recording {
    double sample_rate_hz = 0.0;
    ChannelLayout layout;
    Eigen::MatrixXd samples;  // channels x time
    std::string subject_id;
    std::vector<LabelSpan> spans;

    std::size_t channel_count() const { return static_cast<std::size_t>(samples.rows()); }
    std::size_t sample_count() const { return static_cast<std::size_t>(samples.cols()); }
    double duration_s() const;

    // Invariants: rows match layout, at least one sample, positive rate,
    // spans inside the recording.
    void validate() const;
};

// Returns a copy of r without the named channels; remaining channel order is
// preserved. Spans and metadata are untouched. Throws UnknownChannel if a
// name is not in the layout.
Recording exclude_channels(const Recording& r, const std::vector<std::string>& names);

// The 64-electrode montage of a standard actiCAP-style cap, cap order. The
// last three entries of interest for this pipeline are the reference (FCz)
// and the two eye channels (FT9, FT10); excluding them leaves 61.
const std::vector<std::string>& standard_64_channel_names();

// {FCz, FT9, FT10}
const std::vector<std::string>& default_excluded_channels();

}  // namespace eegclf
