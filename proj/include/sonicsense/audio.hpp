#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "sonicsense/core.hpp"
#include "sonicsense/fft.hpp"

namespace sonic {

inline constexpr size_t kClipLength = 20000;   // samples per strike clip
inline constexpr size_t kMelBands = 64;
inline constexpr size_t kMelFrames = 64;
inline constexpr size_t kMelFftSize = 2048;
inline constexpr double kMelFmaxDefault = 8192.0;
inline constexpr double kDbFloor = -80.0;

// Mono sensing signal. Amplitudes normalized to [-1, 1], rate fixed at 44100.
struct Waveform {
    std::vector<double> samples;
    uint32_t rate = kSampleRate;

    Waveform() = default;
    explicit Waveform(std::vector<double> s, uint32_t r = kSampleRate)
        : samples(std::move(s)), rate(r) {
        validate();
    }

    void validate() const {
        if (rate != kSampleRate)
            throw InvalidInput("waveform rate must be 44100");
        if (samples.empty())
            throw InvalidInput("waveform must be non-empty");
        for (double s : samples)
            if (!(std::abs(s) <= 1.0))
                throw InvalidInput("waveform amplitude out of [-1,1]");
    }
};

// Fixed 20000-sample segment anchored at the detected window start.
struct StrikeClip {
    std::vector<double> samples;  // length kClipLength
    size_t source_offset = 0;     // sample index into the parent waveform
    size_t padded = 0;            // zeros appended because the waveform ended

    void validate() const {
        if (samples.size() != kClipLength)
            throw InvalidInput("strike clip must have exactly 20000 samples");
    }
};

struct MelParams {
    size_t fft_size = kMelFftSize;
    size_t n_mels = kMelBands;
    size_t n_frames = kMelFrames;
    double f_max = kMelFmaxDefault;
    // Standardize (zero mean / unit variance) before the spectrogram enters a
    // network. Applied by the pipeline, not by mel_spectrogram itself.
    bool standardize_for_net = true;
};

// 64x64 log-power image of one strike (mel band x frame).
struct MelSpectrogram {
    std::vector<double> values; // row-major, n_mels rows x n_frames cols
    size_t n_mels = kMelBands;
    size_t n_frames = kMelFrames;
    size_t fft_size = kMelFftSize;
    size_t hop = 0;
    double f_max = kMelFmaxDefault;

    double at(size_t band, size_t frame) const { return values[band * n_frames + frame]; }
    double& at(size_t band, size_t frame) { return values[band * n_frames + frame]; }
};

// ---------------------------------------------------------------------------
// Strike detection and extraction
// ---------------------------------------------------------------------------

// Scans non-overlapping windows of `window` samples and returns the start
// index of the first window whose mean |amplitude| strictly exceeds both
// neighbors. nullopt when no window qualifies (e.g. flat signal).
inline std::optional<size_t> detect_strike(const Waveform& w, size_t window = 1000) {
    if (window == 0) throw InvalidInput("detect_strike: window must be positive");
    size_t n_win = w.samples.size() / window;
    if (n_win < 3)
        throw InvalidInput("detect_strike: waveform shorter than 3 windows");

    std::vector<double> mean_abs(n_win);
    for (size_t k = 0; k < n_win; ++k) {
        double acc = 0.0;
        for (size_t i = k * window; i < (k + 1) * window; ++i) acc += std::abs(w.samples[i]);
        mean_abs[k] = acc / double(window);
    }
    for (size_t k = 1; k + 1 < n_win; ++k)
        if (mean_abs[k] > mean_abs[k - 1] && mean_abs[k] > mean_abs[k + 1])
            return k * window;
    return std::nullopt;
}

// 20000 samples beginning at `offset`; zero-padded when the waveform ends
// before the clip does. The pad count is recorded on the clip.
inline StrikeClip extract_clip(const Waveform& w, size_t offset) {
    if (offset >= w.samples.size())
        throw InvalidInput("extract_clip: offset beyond waveform");
    StrikeClip clip;
    clip.source_offset = offset;
    clip.samples.resize(kClipLength, 0.0);
    size_t avail = std::min(kClipLength, w.samples.size() - offset);
    std::copy_n(w.samples.begin() + long(offset), avail, clip.samples.begin());
    clip.padded = kClipLength - avail;
    return clip;
}

// ---------------------------------------------------------------------------
// Mel filterbank and spectrogram
// ---------------------------------------------------------------------------

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular mel filters on the HTK scale, each row peak-normalized to 1.
// Rows: n_mels, cols: fft_size/2 + 1 bins.
inline std::vector<std::vector<double>> mel_filterbank(size_t n_mels, size_t fft_size,
                                                       double f_max, double rate = kSampleRate) {
    size_t n_bins = fft_size / 2 + 1;
    double mel_lo = hz_to_mel(0.0), mel_hi = hz_to_mel(f_max);
    std::vector<double> pts(n_mels + 2);
    for (size_t i = 0; i < pts.size(); ++i)
        pts[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * double(i) / double(n_mels + 1));

    std::vector<std::vector<double>> fb(n_mels, std::vector<double>(n_bins, 0.0));
    for (size_t m = 0; m < n_mels; ++m) {
        double lo = pts[m], c = pts[m + 1], hi = pts[m + 2];
        double peak = 0.0;
        for (size_t b = 0; b < n_bins; ++b) {
            double f = double(b) * rate / double(fft_size);
            double wgt = 0.0;
            if (f > lo && f < hi)
                wgt = f <= c ? (f - lo) / (c - lo) : (hi - f) / (hi - c);
            fb[m][b] = wgt;
            peak = std::max(peak, wgt);
        }
        if (peak > 0.0)
            for (auto& v : fb[m]) v /= peak;
    }
    return fb;
}

// Log-power mel spectrogram of one strike clip. Hop is the clip length
// divided by the frame count, rounded to the nearest integer (313 for the
// 20000-sample clip); output is exactly n_mels x n_frames. dB relative to
// the per-spectrogram maximum, floored at -80 dB.
inline MelSpectrogram mel_spectrogram(const StrikeClip& clip, const MelParams& p = {}) {
    clip.validate();
    if (p.f_max > kSampleRate / 2.0)
        throw InvalidInput("mel_spectrogram: f_max above Nyquist");

    MelSpectrogram out;
    out.n_mels = p.n_mels;
    out.n_frames = p.n_frames;
    out.fft_size = p.fft_size;
    out.f_max = p.f_max;
    out.hop = size_t(std::lround(double(kClipLength) / double(p.n_frames)));

    Stft stft;
    stft.fft_size = p.fft_size;
    stft.hop = out.hop;
    auto mags = stft.magnitudes(clip.samples, p.n_frames);

    auto fb = mel_filterbank(p.n_mels, p.fft_size, p.f_max);
    std::vector<double> power(p.n_mels * p.n_frames, 0.0);
    double max_power = 0.0;
    for (size_t t = 0; t < p.n_frames; ++t) {
        for (size_t m = 0; m < p.n_mels; ++m) {
            double acc = 0.0;
            const auto& row = fb[m];
            for (size_t b = 0; b < row.size(); ++b) {
                if (row[b] != 0.0) acc += row[b] * mags[t][b] * mags[t][b];
            }
            power[m * p.n_frames + t] = acc;
            max_power = std::max(max_power, acc);
        }
    }

    out.values.resize(power.size());
    if (max_power <= 0.0) {
        std::fill(out.values.begin(), out.values.end(), kDbFloor);
        return out;
    }
    for (size_t i = 0; i < power.size(); ++i) {
        double db = power[i] > 0.0 ? 10.0 * std::log10(power[i] / max_power) : kDbFloor;
        out.values[i] = std::max(db, kDbFloor);
    }
    return out;
}

// Per-spectrogram standardization used before spectrograms enter a network.
inline std::vector<double> standardized(const MelSpectrogram& spec) {
    double mean = 0.0;
    for (double v : spec.values) mean += v;
    mean /= double(spec.values.size());
    double var = 0.0;
    for (double v : spec.values) var += (v - mean) * (v - mean);
    var /= double(spec.values.size());
    double sd = std::sqrt(var);
    std::vector<double> out(spec.values.size());
    if (sd == 0.0) return out; // flat spectrogram maps to zeros
    for (size_t i = 0; i < out.size(); ++i) out[i] = (spec.values[i] - mean) / sd;
    return out;
}

// ---------------------------------------------------------------------------
// Spectrogram files: flat binary f32 row-major plus a JSON sidecar.
// ---------------------------------------------------------------------------

inline void save_spectrogram(const MelSpectrogram& spec, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    std::vector<float> v(spec.values.begin(), spec.values.end());
    f.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(float)));
    if (!f) throw IoError("short write: " + path);

    std::ofstream side(path + ".json");
    if (!side) throw IoError("cannot open for writing: " + path + ".json");
    side << "{\"fft\":" << spec.fft_size << ",\"n_mels\":" << spec.n_mels
         << ",\"f_max\":" << spec.f_max << ",\"hop\":" << spec.hop << "}\n";
}

inline MelSpectrogram load_spectrogram(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open spectrogram: " + path);
    std::vector<char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (raw.size() != kMelBands * kMelFrames * sizeof(float))
        throw IoError(path + ": expected " + std::to_string(kMelBands * kMelFrames) +
                      " f32 values");
    MelSpectrogram spec;
    spec.values.resize(kMelBands * kMelFrames);
    const auto* fp = reinterpret_cast<const float*>(raw.data());
    for (size_t i = 0; i < spec.values.size(); ++i) spec.values[i] = double(fp[i]);
    spec.hop = size_t(std::lround(double(kClipLength) / double(kMelFrames)));
    return spec;
}

} // namespace sonic
