#include "eegclf/feature_archive.hpp"

#include <cstring>

#include "binary_io.hpp"
#include "eegclf/errors.hpp"

namespace eegclf {

void save_feature_archive(const std::filesystem::path& path, const Dataset& ds, MatrixKind kind) {
    ds.validate();
    if (ds.items.empty()) {
        throw EmptyDataset("refusing to write an empty feature archive");
    }
    const Eigen::Index c = ds.items.front().dim();
    if (ds.items.front().steps() != c) {
        throw ShapeMismatch("feature sequences must be square to archive");
    }

    auto os = detail::open_for_write(path);
    detail::put_bytes(os, kFeatureArchiveMagic, 4);
    detail::put_u16(os, kFeatureArchiveVersion);
    os.put(kind == MatrixKind::Plain ? '\0' : '\x01');
    detail::put_u16(os, static_cast<std::uint16_t>(c));
    detail::put_u64(os, ds.items.size());
    detail::put_u16(os, static_cast<std::uint16_t>(ds.class_vocab.size()));
    for (const auto& name : ds.class_vocab) {
        detail::put_str16(os, name);
    }
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
        detail::put_u32(os, static_cast<std::uint32_t>(ds.labels[i]));
        const auto& m = ds.items[i].rows;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index col = 0; col < m.cols(); ++col) {
                detail::put_f64(os, m(r, col));
            }
        }
    }
    os.flush();
    if (!os) {
        throw Error("write failed: " + path.string());
    }
}

FeatureArchive load_feature_archive(const std::filesystem::path& path) {
    auto is = detail::open_for_read(path);
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || std::memcmp(magic, kFeatureArchiveMagic, 4) != 0) {
        throw BadMagic("not a feature archive: " + path.string());
    }
    detail::Reader rd(is);
    const std::uint16_t version = rd.u16();
    if (version != kFeatureArchiveVersion) {
        throw Error("unsupported feature archive version " + std::to_string(version));
    }

    FeatureArchive archive;
    char kind_byte = 0;
    rd.bytes(&kind_byte, 1);
    archive.kind = kind_byte == 0 ? MatrixKind::Plain : MatrixKind::Derivative;
    const Eigen::Index c = rd.u16();
    const std::uint64_t count = rd.u64();
    const std::uint16_t k = rd.u16();
    for (std::uint16_t i = 0; i < k; ++i) {
        archive.dataset.class_vocab.push_back(rd.str16());
    }

    archive.dataset.items.reserve(count);
    archive.dataset.labels.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint32_t label = rd.u32();
        if (label >= k) {
            throw IndexOutOfRange("archive label id out of vocabulary range");
        }
        FeatureSequence seq;
        seq.rows.resize(c, c);
        for (Eigen::Index r = 0; r < c; ++r) {
            for (Eigen::Index col = 0; col < c; ++col) {
                seq.rows(r, col) = rd.f64();
            }
        }
        archive.dataset.labels.push_back(label);
        archive.dataset.items.push_back(std::move(seq));
    }
    archive.dataset.validate();
    return archive;
}

}  // namespace eegclf
