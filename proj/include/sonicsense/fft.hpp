#pragma once

#include <complex>
#include <vector>

#include "sonicsense/core.hpp"

namespace sonic {

// In-place iterative radix-2 Cooley-Tukey. Size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw InvalidInput("fft size must be a nonzero power of two");

    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * kPi / double(len);
        std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Magnitude spectrum of a real frame: |X[k]| for k in [0, n/2].
inline std::vector<double> real_magnitude_spectrum(const std::vector<double>& frame) {
    std::vector<std::complex<double>> buf(frame.size());
    for (size_t i = 0; i < frame.size(); ++i) buf[i] = frame[i];
    fft_inplace(buf);
    std::vector<double> mag(frame.size() / 2 + 1);
    for (size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(buf[k]);
    return mag;
}

// Periodic Hann window.
inline std::vector<double> hann_window(size_t n) {
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * double(i) / double(n)));
    return w;
}

struct Stft {
    size_t fft_size = 2048;
    size_t hop = 512;
    bool reflect_pad = true; // frames centered at t*hop; edges reflect-padded

    // Returns frames x bins magnitude matrix, bins = fft_size/2 + 1.
    // Frame t is the windowed slice centered at sample t*hop.
    std::vector<std::vector<double>> magnitudes(const std::vector<double>& samples,
                                                size_t n_frames) const {
        const auto win = hann_window(fft_size);
        const long half = long(fft_size) / 2;
        const long len = long(samples.size());
        std::vector<std::vector<double>> out(n_frames);
        std::vector<double> frame(fft_size);
        for (size_t t = 0; t < n_frames; ++t) {
            long center = long(t * hop);
            for (size_t i = 0; i < fft_size; ++i) {
                long idx = center - half + long(i);
                double s = 0.0;
                if (idx >= 0 && idx < len) {
                    s = samples[idx];
                } else if (reflect_pad && len > 1) {
                    // reflect without repeating the edge sample
                    long m = idx;
                    while (m < 0 || m >= len) {
                        if (m < 0) m = -m;
                        if (m >= len) m = 2 * (len - 1) - m;
                    }
                    s = samples[m];
                }
                frame[i] = s * win[i];
            }
            out[t] = real_magnitude_spectrum(frame);
        }
        return out;
    }

    // librosa-style frame count for centered frames
    size_t frame_count(size_t n_samples) const { return 1 + n_samples / hop; }
};

} // namespace sonic
