#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "sonicsense/core.hpp"

namespace sonic {

// PCM 16-bit mono WAV at 44,100 Hz — the only on-disk audio format used.

inline constexpr uint32_t kSampleRate = 44100;

namespace detail {
inline void put_u32(std::string& s, uint32_t v) {
    for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline void put_u16(std::string& s, uint16_t v) {
    for (int i = 0; i < 2; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
inline uint32_t get_u32(const unsigned char* p) {
    return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
inline uint16_t get_u16(const unsigned char* p) {
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
}
} // namespace detail

inline void write_wav(const std::string& path, const std::vector<double>& samples,
                      uint32_t rate = kSampleRate) {
    std::string out;
    out.reserve(44 + samples.size() * 2);
    out += "RIFF";
    detail::put_u32(out, uint32_t(36 + samples.size() * 2));
    out += "WAVEfmt ";
    detail::put_u32(out, 16);
    detail::put_u16(out, 1); // PCM
    detail::put_u16(out, 1); // mono
    detail::put_u32(out, rate);
    detail::put_u32(out, rate * 2);
    detail::put_u16(out, 2);
    detail::put_u16(out, 16);
    out += "data";
    detail::put_u32(out, uint32_t(samples.size() * 2));
    for (double s : samples) {
        double c = s < -1.0 ? -1.0 : (s > 1.0 ? 1.0 : s);
        auto v = int16_t(std::lround(c * 32767.0));
        detail::put_u16(out, uint16_t(v));
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw IoError("short write: " + path);
}

inline std::vector<double> read_wav(const std::string& path, uint32_t expect_rate = kSampleRate) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open wav: " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
        throw IoError("not a RIFF/WAVE file: " + path);

    size_t pos = 12;
    uint16_t channels = 0, bits = 0;
    uint32_t rate = 0;
    std::vector<double> samples;
    bool got_fmt = false, got_data = false;
    while (pos + 8 <= buf.size()) {
        const unsigned char* chunk = buf.data() + pos;
        uint32_t size = detail::get_u32(chunk + 4);
        const unsigned char* body = chunk + 8;
        if (pos + 8 + size > buf.size()) throw IoError("truncated chunk in " + path);
        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw IoError("bad fmt chunk in " + path);
            uint16_t fmt = detail::get_u16(body);
            channels = detail::get_u16(body + 2);
            rate = detail::get_u32(body + 4);
            bits = detail::get_u16(body + 14);
            if (fmt != 1 || channels != 1 || bits != 16)
                throw IoError(path + ": expected PCM16 mono, got fmt=" + std::to_string(fmt) +
                              " ch=" + std::to_string(channels) + " bits=" + std::to_string(bits));
            got_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!got_fmt) throw IoError("data before fmt in " + path);
            size_t n = size / 2;
            samples.resize(n);
            for (size_t i = 0; i < n; ++i) {
                auto v = int16_t(detail::get_u16(body + 2 * i));
                samples[i] = double(v) / 32767.0;
            }
            got_data = true;
        }
        pos += 8 + size + (size & 1);
    }
    if (!got_data) throw IoError("no data chunk in " + path);
    if (expect_rate != 0 && rate != expect_rate)
        throw IoError(path + ": sample rate " + std::to_string(rate) + ", expected " +
                      std::to_string(expect_rate));
    return samples;
}

} // namespace sonic
