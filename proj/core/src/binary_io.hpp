#pragma once

// Little-endian stream helpers shared by the .eegr, .eegf and .ckpt readers
// and writers. Byte order is assembled explicitly, so the formats hold on
// big-endian hosts too.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "eegclf/errors.hpp"

namespace eegclf::detail {

inline void put_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename UInt>
void put_le(std::ostream& os, UInt v) {
    unsigned char buf[sizeof(UInt)];
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
    }
    put_bytes(os, buf, sizeof(UInt));
}

inline void put_u16(std::ostream& os, std::uint16_t v) { put_le(os, v); }
inline void put_u32(std::ostream& os, std::uint32_t v) { put_le(os, v); }
inline void put_u64(std::ostream& os, std::uint64_t v) { put_le(os, v); }

inline void put_f32(std::ostream& os, float v) { put_u32(os, std::bit_cast<std::uint32_t>(v)); }
inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

inline void put_str16(std::ostream& os, const std::string& s) {
    if (s.size() > 0xffff) {
        throw Error("string too long for u16 length prefix");
    }
    put_u16(os, static_cast<std::uint16_t>(s.size()));
    put_bytes(os, s.data(), s.size());
}

// Reader over an already-opened stream; short reads raise TruncatedPayload.
class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    void bytes(void* p, std::size_t n) {
        is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is_.gcount()) != n) {
            throw TruncatedPayload("file ends before the declared data");
        }
    }

    template <typename UInt>
    UInt get_le() {
        unsigned char buf[sizeof(UInt)];
        bytes(buf, sizeof(UInt));
        UInt v = 0;
        for (std::size_t i = 0; i < sizeof(UInt); ++i) {
            v |= static_cast<UInt>(buf[i]) << (8 * i);
        }
        return v;
    }

    std::uint16_t u16() { return get_le<std::uint16_t>(); }
    std::uint32_t u32() { return get_le<std::uint32_t>(); }
    std::uint64_t u64() { return get_le<std::uint64_t>(); }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str16() {
        const std::size_t n = u16();
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

private:
    std::istream& is_;
};

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw Error("cannot open for writing: " + path.string());
    }
    return os;
}

inline std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error("cannot open for reading: " + path.string());
    }
    return is;
}

}  // namespace eegclf::detail
