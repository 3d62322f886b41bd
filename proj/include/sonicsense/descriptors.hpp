#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

#include "sonicsense/audio.hpp"
#include "sonicsense/core.hpp"
#include "sonicsense/fft.hpp"

namespace sonic {

inline constexpr size_t kNumDescriptors = 12;

// Parameters of the twelve-descriptor extraction. Roll-off percentage and
// poly order follow the processing-parameter table; everything vector-valued
// is averaged over both time and coefficient axes to a single scalar.
struct DescriptorParams {
    size_t fft_size = 2048;
    size_t hop = 512;
    double rolloff_percent = 0.9;
    int poly_order = 3;
    size_t n_mfcc = 20;
    size_t mfcc_mels = 64;
    size_t contrast_bands = 6;
    double contrast_fmin = 200.0;
    double contrast_quantile = 0.02;
    size_t tempogram_window = 384; // frames, capped at the clip's frame count
};

// D1..D12: RMS, spectral centroid, bandwidth, contrast, flatness, roll-off,
// zero-crossing rate, tempogram, poly features, MFCCs, chroma, tonnetz.
struct DescriptorVector {
    std::array<double, kNumDescriptors> d{};

    double operator[](size_t i) const { return d[i]; }
    double& operator[](size_t i) { return d[i]; }
};

namespace detail {

// Least-squares polynomial fit of y(x), x normalized to [0,1].
// Returns order+1 coefficients (constant term first).
inline std::vector<double> poly_fit(const std::vector<double>& y, int order) {
    const size_t n = y.size();
    const int m = order + 1;
    // normal equations A c = b with A[i][j] = sum x^(i+j)
    std::vector<double> pow_sums(2 * m - 1, 0.0), b(m, 0.0);
    for (size_t k = 0; k < n; ++k) {
        double x = n > 1 ? double(k) / double(n - 1) : 0.0;
        double xp = 1.0;
        for (int i = 0; i < 2 * m - 1; ++i) {
            pow_sums[i] += xp;
            if (i < m) b[i] += xp * y[k];
            xp *= x;
        }
    }
    std::vector<double> a(size_t(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) a[size_t(i) * m + j] = pow_sums[i + j];
    // Gaussian elimination with partial pivoting
    std::vector<double> c = b;
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[size_t(r) * m + col]) > std::abs(a[size_t(piv) * m + col])) piv = r;
        for (int j = 0; j < m; ++j) std::swap(a[size_t(col) * m + j], a[size_t(piv) * m + j]);
        std::swap(c[col], c[piv]);
        double d = a[size_t(col) * m + col];
        if (std::abs(d) < 1e-30) continue; // degenerate (all-zero frame)
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            double f = a[size_t(r) * m + col] / d;
            for (int j = 0; j < m; ++j) a[size_t(r) * m + j] -= f * a[size_t(col) * m + j];
            c[r] -= f * c[col];
        }
    }
    for (int i = 0; i < m; ++i) {
        double d = a[size_t(i) * m + i];
        c[i] = std::abs(d) < 1e-30 ? 0.0 : c[i] / d;
    }
    return c;
}

// DCT-II with orthonormal scaling, first n_out coefficients.
inline std::vector<double> dct2_ortho(const std::vector<double>& x, size_t n_out) {
    const size_t n = x.size();
    std::vector<double> out(n_out, 0.0);
    for (size_t k = 0; k < n_out && k < n; ++k) {
        double acc = 0.0;
        for (size_t i = 0; i < n; ++i)
            acc += x[i] * std::cos(kPi * (double(i) + 0.5) * double(k) / double(n));
        double scale = k == 0 ? std::sqrt(1.0 / double(n)) : std::sqrt(2.0 / double(n));
        out[k] = scale * acc;
    }
    return out;
}

struct TonnetzBasis {
    // 6 x 12 projection: fifths, minor-third and major-third circles.
    std::array<std::array<double, 12>, 6> v{};
    TonnetzBasis() {
        const double scale[6] = {7.0 * kPi / 6.0, 7.0 * kPi / 6.0, 3.0 * kPi / 2.0,
                                 3.0 * kPi / 2.0, 2.0 * kPi / 3.0, 2.0 * kPi / 3.0};
        const double radius[6] = {1.0, 1.0, 1.0, 1.0, 0.5, 0.5};
        for (int i = 0; i < 6; ++i)
            for (int p = 0; p < 12; ++p) {
                double a = scale[i] * double(p);
                v[i][p] = radius[i] * (i % 2 == 0 ? std::sin(a) : std::cos(a));
            }
    }
};

} // namespace detail

// Extracts the twelve scalar descriptors from one strike clip.
inline DescriptorVector descriptors(const StrikeClip& clip, const DescriptorParams& p = {}) {
    clip.validate();
    const auto& x = clip.samples;
    const double rate = kSampleRate;

    Stft stft;
    stft.fft_size = p.fft_size;
    stft.hop = p.hop;
    const size_t T = stft.frame_count(x.size());
    auto mags = stft.magnitudes(x, T);
    const size_t n_bins = mags[0].size();
    const double bin_hz = rate / double(p.fft_size);

    DescriptorVector out;

    // --- time-domain frames (same centers as the STFT, reflect padded)
    {
        const long half = long(p.fft_size) / 2;
        const long len = long(x.size());
        double rms_acc = 0.0, zcr_acc = 0.0;
        for (size_t t = 0; t < T; ++t) {
            long center = long(t * p.hop);
            double sq = 0.0;
            size_t crossings = 0;
            double prev = 0.0;
            bool have_prev = false;
            for (size_t i = 0; i < p.fft_size; ++i) {
                long idx = center - half + long(i);
                double s = 0.0;
                if (idx >= 0 && idx < len) s = x[idx];
                sq += s * s;
                if (have_prev && ((prev >= 0.0) != (s >= 0.0))) ++crossings;
                prev = s;
                have_prev = true;
            }
            rms_acc += std::sqrt(sq / double(p.fft_size));
            zcr_acc += double(crossings) / double(p.fft_size - 1);
        }
        out[0] = rms_acc / double(T); // D1
        out[6] = zcr_acc / double(T); // D7
    }

    // --- per-frame spectral descriptors
    double centroid_acc = 0, bandwidth_acc = 0, contrast_acc = 0, flatness_acc = 0,
           rolloff_acc = 0, poly_acc = 0, mfcc_acc = 0, chroma_acc = 0, tonnetz_acc = 0;

    auto mel_fb = mel_filterbank(p.mfcc_mels, p.fft_size, rate / 2.0);
    static const detail::TonnetzBasis tonnetz_basis;

    // contrast band edges: [0, fmin], then octaves up to Nyquist
    std::vector<double> band_edges{0.0, p.contrast_fmin};
    for (size_t k = 1; k <= p.contrast_bands; ++k)
        band_edges.push_back(std::min(p.contrast_fmin * std::pow(2.0, double(k)), rate / 2.0));

    std::vector<std::vector<double>> mel_db(T); // for the tempogram onset envelope

    for (size_t t = 0; t < T; ++t) {
        const auto& S = mags[t];
        double total = 0.0, total_pow = 0.0;
        for (size_t b = 0; b < n_bins; ++b) {
            total += S[b];
            total_pow += S[b] * S[b];
        }

        // D2 centroid, D3 bandwidth
        double centroid = 0.0;
        if (total > 0.0) {
            for (size_t b = 0; b < n_bins; ++b) centroid += double(b) * bin_hz * S[b];
            centroid /= total;
        }
        centroid_acc += centroid;
        double bw = 0.0;
        if (total > 0.0) {
            for (size_t b = 0; b < n_bins; ++b) {
                double d = double(b) * bin_hz - centroid;
                bw += d * d * S[b];
            }
            bw = std::sqrt(bw / total);
        }
        bandwidth_acc += bw;

        // D4 contrast: per octave band, log ratio of top/bottom quantile means of power
        {
            double band_sum = 0.0;
            size_t n_used = 0;
            for (size_t k = 0; k + 1 < band_edges.size(); ++k) {
                std::vector<double> pw;
                for (size_t b = 0; b < n_bins; ++b) {
                    double f = double(b) * bin_hz;
                    if (f >= band_edges[k] && f < band_edges[k + 1]) pw.push_back(S[b] * S[b]);
                }
                if (pw.empty()) continue;
                std::sort(pw.begin(), pw.end());
                size_t q = std::max<size_t>(1, size_t(double(pw.size()) * p.contrast_quantile));
                double valley = std::accumulate(pw.begin(), pw.begin() + long(q), 0.0) / double(q);
                double peak = std::accumulate(pw.end() - long(q), pw.end(), 0.0) / double(q);
                const double eps = 1e-20;
                band_sum += 10.0 * std::log10((peak + eps) / (valley + eps));
                ++n_used;
            }
            if (n_used > 0) contrast_acc += band_sum / double(n_used);
        }

        // D5 flatness on the power spectrum, floored like common practice
        {
            const double amin = 1e-10;
            double log_acc = 0.0, arith = 0.0;
            for (size_t b = 0; b < n_bins; ++b) {
                double v = std::max(S[b] * S[b], amin);
                log_acc += std::log(v);
                arith += v;
            }
            flatness_acc += std::exp(log_acc / double(n_bins)) / (arith / double(n_bins));
        }

        // D6 roll-off
        {
            double target = p.rolloff_percent * total_pow;
            double cum = 0.0, roll = 0.0;
            if (total_pow > 0.0) {
                for (size_t b = 0; b < n_bins; ++b) {
                    cum += S[b] * S[b];
                    if (cum >= target) {
                        roll = double(b) * bin_hz;
                        break;
                    }
                }
            }
            rolloff_acc += roll;
        }

        // D9 poly features: cubic fit of magnitude vs normalized frequency
        {
            auto coef = detail::poly_fit(S, p.poly_order);
            poly_acc += std::accumulate(coef.begin(), coef.end(), 0.0) / double(coef.size());
        }

        // D10 MFCC: log mel power -> DCT-II
        {
            std::vector<double> logmel(p.mfcc_mels);
            for (size_t m = 0; m < p.mfcc_mels; ++m) {
                double acc = 0.0;
                for (size_t b = 0; b < n_bins; ++b)
                    if (mel_fb[m][b] != 0.0) acc += mel_fb[m][b] * S[b] * S[b];
                logmel[m] = std::log(std::max(acc, 1e-10));
            }
            mel_db[t] = logmel;
            auto cc = detail::dct2_ortho(logmel, p.n_mfcc);
            mfcc_acc += std::accumulate(cc.begin(), cc.end(), 0.0) / double(cc.size());
        }

        // D11 chroma and D12 tonnetz
        {
            std::array<double, 12> chroma{};
            for (size_t b = 1; b < n_bins; ++b) {
                double f = double(b) * bin_hz;
                if (f < 32.0) continue;
                int pc = int(std::lround(12.0 * std::log2(f / 440.0))) % 12;
                if (pc < 0) pc += 12;
                chroma[pc] += S[b] * S[b];
            }
            double cmax = *std::max_element(chroma.begin(), chroma.end());
            std::array<double, 12> cn{};
            if (cmax > 0.0)
                for (int i = 0; i < 12; ++i) cn[i] = chroma[i] / cmax;
            chroma_acc += std::accumulate(cn.begin(), cn.end(), 0.0) / 12.0;

            double l1 = std::accumulate(cn.begin(), cn.end(), 0.0);
            double ton_sum = 0.0;
            if (l1 > 0.0) {
                for (int i = 0; i < 6; ++i) {
                    double v = 0.0;
                    for (int pc = 0; pc < 12; ++pc) v += tonnetz_basis.v[i][pc] * cn[pc] / l1;
                    ton_sum += v;
                }
            }
            tonnetz_acc += ton_sum / 6.0;
        }
    }

    out[1] = centroid_acc / double(T);
    out[2] = bandwidth_acc / double(T);
    out[3] = contrast_acc / double(T);
    out[4] = flatness_acc / double(T);
    out[5] = rolloff_acc / double(T);
    out[8] = poly_acc / double(T);
    out[9] = mfcc_acc / double(T);
    out[10] = chroma_acc / double(T);
    out[11] = tonnetz_acc / double(T);

    // D8 tempogram: autocorrelation of the onset-strength envelope computed
    // from positive mel log-power flux, window capped at the clip length.
    {
        std::vector<double> onset(T, 0.0);
        for (size_t t = 1; t < T; ++t) {
            double acc = 0.0;
            for (size_t m = 0; m < p.mfcc_mels; ++m)
                acc += std::max(0.0, mel_db[t][m] - mel_db[t - 1][m]);
            onset[t] = acc / double(p.mfcc_mels);
        }
        size_t win = std::min(p.tempogram_window, T);
        double r0 = 0.0;
        for (size_t t = 0; t < T; ++t) r0 += onset[t] * onset[t];
        double acc = 0.0;
        if (r0 > 0.0) {
            for (size_t lag = 0; lag < win; ++lag) {
                double r = 0.0;
                for (size_t t = 0; t + lag < T; ++t) r += onset[t] * onset[t + lag];
                acc += r / r0;
            }
            acc /= double(win);
        }
        out[7] = acc;
    }

    return out;
}

// Per-column min-max rescaling of descriptor rows to [0,1].
// Constant columns map to 0.
inline std::vector<std::array<double, kNumDescriptors>> rescale_unit(
    const std::vector<DescriptorVector>& rows) {
    if (rows.size() < 2)
        throw InvalidInput("rescale_unit: need at least 2 rows");
    std::array<double, kNumDescriptors> lo{}, hi{};
    for (size_t c = 0; c < kNumDescriptors; ++c) {
        lo[c] = hi[c] = rows[0][c];
        for (const auto& r : rows) {
            lo[c] = std::min(lo[c], r[c]);
            hi[c] = std::max(hi[c], r[c]);
        }
    }
    std::vector<std::array<double, kNumDescriptors>> out(rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t c = 0; c < kNumDescriptors; ++c) {
            double range = hi[c] - lo[c];
            out[i][c] = range > 0.0 ? (rows[i][c] - lo[c]) / range : 0.0;
        }
    return out;
}

// Feature CSV with the D1..D12 header.
inline void write_descriptor_csv(const std::string& path,
                                 const std::vector<std::array<double, kNumDescriptors>>& rows) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    for (size_t c = 0; c < kNumDescriptors; ++c)
        f << (c ? "," : "") << "D" << (c + 1);
    f << "\n";
    f.precision(12);
    for (const auto& r : rows) {
        for (size_t c = 0; c < kNumDescriptors; ++c) f << (c ? "," : "") << r[c];
        f << "\n";
    }
}

} // namespace sonic
