#include "eegclf/recording_io.hpp"

#include <cstring>
#include <vector>

#include "binary_io.hpp"
#include "eegclf/errors.hpp"

namespace eegclf {

void write_recording(const std::filesystem::path& path, const Recording& r) {
    if (static_cast<std::size_t>(r.samples.rows()) != r.layout.count()) {
        throw ChannelMismatch("recording has " + std::to_string(r.samples.rows()) +
                              " sample rows but " + std::to_string(r.layout.count()) +
                              " channel names");
    }
    r.layout.validate();

    auto os = detail::open_for_write(path);
    detail::put_bytes(os, kRecordingMagic, 4);
    detail::put_u16(os, kRecordingFormatVersion);
    detail::put_f64(os, r.sample_rate_hz);
    detail::put_u16(os, static_cast<std::uint16_t>(r.layout.count()));
    detail::put_u64(os, r.sample_count());
    for (const auto& name : r.layout.names) {
        detail::put_str16(os, name);
    }

    // Channel-major payload, one f32 per sample.
    std::vector<unsigned char> row(r.sample_count() * 4);
    for (Eigen::Index c = 0; c < r.samples.rows(); ++c) {
        for (Eigen::Index t = 0; t < r.samples.cols(); ++t) {
            const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(r.samples(c, t)));
            unsigned char* p = row.data() + 4 * static_cast<std::size_t>(t);
            p[0] = static_cast<unsigned char>(bits & 0xffu);
            p[1] = static_cast<unsigned char>((bits >> 8) & 0xffu);
            p[2] = static_cast<unsigned char>((bits >> 16) & 0xffu);
            p[3] = static_cast<unsigned char>((bits >> 24) & 0xffu);
        }
        detail::put_bytes(os, row.data(), row.size());
    }
    os.flush();
    if (!os) {
        throw Error("write failed: " + path.string());
    }
}

Recording load_recording(const std::filesystem::path& path) {
    const auto file_size = std::filesystem::file_size(path);
    auto is = detail::open_for_read(path);

    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kRecordingMagic, 4) != 0) {
        throw BadMagic("not a recording file: " + path.string());
    }

    detail::Reader rd(is);
    const std::uint16_t version = rd.u16();
    if (version != kRecordingFormatVersion) {
        throw Error("unsupported recording format version " + std::to_string(version));
    }
    const double rate = rd.f64();
    const std::size_t channel_count = rd.u16();
    const std::uint64_t sample_count = rd.u64();
    if (!(rate > 0.0)) {
        throw Error("recording header declares a non-positive sample rate");
    }

    Recording r;
    r.sample_rate_hz = rate;
    r.layout.names.reserve(channel_count);
    for (std::size_t c = 0; c < channel_count; ++c) {
        r.layout.names.push_back(rd.str16());
    }
    r.layout.validate();

    // The payload must account for every remaining byte. Fewer bytes than
    // declared is a truncated file; extra bytes mean the name table and the
    // declared channel count did not line up.
    const std::uint64_t payload_bytes = 4ull * channel_count * sample_count;
    const std::uint64_t header_bytes = static_cast<std::uint64_t>(is.tellg());
    if (file_size < header_bytes + payload_bytes) {
        throw TruncatedPayload("payload holds fewer samples than the header declares: " +
                               path.string());
    }
    if (file_size > header_bytes + payload_bytes) {
        throw ChannelMismatch("header channel/sample counts do not match the payload size: " +
                              path.string());
    }

    r.samples.resize(static_cast<Eigen::Index>(channel_count),
                     static_cast<Eigen::Index>(sample_count));
    std::vector<unsigned char> row(sample_count * 4);
    for (std::size_t c = 0; c < channel_count; ++c) {
        rd.bytes(row.data(), row.size());
        for (std::uint64_t t = 0; t < sample_count; ++t) {
            const unsigned char* p = row.data() + 4 * t;
            const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                                       (static_cast<std::uint32_t>(p[1]) << 8) |
                                       (static_cast<std::uint32_t>(p[2]) << 16) |
                                       (static_cast<std::uint32_t>(p[3]) << 24);
            r.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
                static_cast<double>(std::bit_cast<float>(bits));
        }
    }
    return r;
}

}  // namespace eegclf
