#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "sonicsense/core.hpp"

namespace sonic {

// Quantitative class-separability check: exact 2-component PCA projection
// for plotting plus the silhouette score of the labeled feature rows.
struct SeparabilityReport {
    std::vector<std::array<double, 2>> pca2d;
    double silhouette = 0.0;
    bool degenerate = false; // all rows identical; silhouette reported as 0
};

namespace detail {

// Jacobi eigendecomposition of a symmetric matrix (row-major d x d).
// Returns eigenvalues descending with matching eigenvectors as rows.
inline void jacobi_eigen(std::vector<double> a, size_t d, std::vector<double>& eigvals,
                         std::vector<double>& eigvecs) {
    eigvecs.assign(d * d, 0.0);
    for (size_t i = 0; i < d; ++i) eigvecs[i * d + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i + 1; j < d; ++j) off += a[i * d + j] * a[i * d + j];
        if (off < 1e-24) break;
        for (size_t p = 0; p < d; ++p)
            for (size_t q = p + 1; q < d; ++q) {
                double apq = a[p * d + q];
                if (std::abs(apq) < 1e-30) continue;
                double theta = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (size_t k = 0; k < d; ++k) {
                    double akp = a[k * d + p], akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for (size_t k = 0; k < d; ++k) {
                    double apk = a[p * d + k], aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                for (size_t k = 0; k < d; ++k) {
                    double vkp = eigvecs[p * d + k], vkq = eigvecs[q * d + k];
                    eigvecs[p * d + k] = c * vkp - s * vkq;
                    eigvecs[q * d + k] = s * vkp + c * vkq;
                }
            }
    }
    eigvals.resize(d);
    for (size_t i = 0; i < d; ++i) eigvals[i] = a[i * d + i];
    // sort descending, vectors follow
    std::vector<size_t> order(d);
    for (size_t i = 0; i < d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t x, size_t y) { return eigvals[x] > eigvals[y]; });
    std::vector<double> ev(d), vecs(d * d);
    for (size_t r = 0; r < d; ++r) {
        ev[r] = eigvals[order[r]];
        for (size_t k = 0; k < d; ++k) vecs[r * d + k] = eigvecs[order[r] * d + k];
    }
    eigvals = std::move(ev);
    eigvecs = std::move(vecs);
}

} // namespace detail

// features: N rows x D columns (row-major), labels: N class ids.
// Preconditions: >= 2 classes, >= 2 points per class.
inline SeparabilityReport separability(const std::vector<std::vector<double>>& features,
                                       const std::vector<int>& labels) {
    const size_t n = features.size();
    if (n == 0 || labels.size() != n)
        throw InvalidInput("separability: features/labels size mismatch");
    const size_t d = features[0].size();
    std::map<int, size_t> class_counts;
    for (int l : labels) ++class_counts[l];
    if (class_counts.size() < 2)
        throw InvalidInput("separability: need at least 2 classes");
    for (const auto& [cls, cnt] : class_counts)
        if (cnt < 2)
            throw InvalidInput("separability: class " + std::to_string(cls) +
                               " has fewer than 2 points");

    SeparabilityReport rep;

    // degenerate: all rows identical
    bool all_same = true;
    for (size_t i = 1; i < n && all_same; ++i)
        for (size_t c = 0; c < d; ++c)
            if (features[i][c] != features[0][c]) {
                all_same = false;
                break;
            }

    // --- exact PCA to 2 components
    std::vector<double> mean(d, 0.0);
    for (const auto& row : features)
        for (size_t c = 0; c < d; ++c) mean[c] += row[c];
    for (auto& m : mean) m /= double(n);

    std::vector<double> cov(d * d, 0.0);
    for (const auto& row : features)
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i; j < d; ++j)
                cov[i * d + j] += (row[i] - mean[i]) * (row[j] - mean[j]);
    for (size_t i = 0; i < d; ++i)
        for (size_t j = i; j < d; ++j) {
            cov[i * d + j] /= double(n - 1);
            cov[j * d + i] = cov[i * d + j];
        }

    std::vector<double> eigvals, eigvecs;
    detail::jacobi_eigen(cov, d, eigvals, eigvecs);
    // pin component sign: largest-|entry| coordinate positive
    for (size_t r = 0; r < std::min<size_t>(2, d); ++r) {
        size_t arg = 0;
        for (size_t k = 1; k < d; ++k)
            if (std::abs(eigvecs[r * d + k]) > std::abs(eigvecs[r * d + arg])) arg = k;
        if (eigvecs[r * d + arg] < 0)
            for (size_t k = 0; k < d; ++k) eigvecs[r * d + k] = -eigvecs[r * d + k];
    }
    rep.pca2d.resize(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t r = 0; r < 2; ++r) {
            double acc = 0.0;
            if (r < d)
                for (size_t c = 0; c < d; ++c)
                    acc += (features[i][c] - mean[c]) * eigvecs[r * d + c];
            rep.pca2d[i][r] = acc;
        }

    if (all_same) {
        rep.degenerate = true;
        rep.silhouette = 0.0;
        return rep;
    }

    // --- silhouette on the original feature rows
    auto dist = [&](size_t i, size_t j) {
        double acc = 0.0;
        for (size_t c = 0; c < d; ++c) {
            double diff = features[i][c] - features[j][c];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    };

    double s_sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        std::map<int, double> sum_by_class;
        std::map<int, size_t> cnt_by_class;
        for (size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_by_class[labels[j]] += dist(i, j);
            ++cnt_by_class[labels[j]];
        }
        double a = cnt_by_class.count(labels[i]) && cnt_by_class[labels[i]] > 0
                       ? sum_by_class[labels[i]] / double(cnt_by_class[labels[i]])
                       : 0.0;
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [cls, cnt] : cnt_by_class) {
            if (cls == labels[i]) continue;
            b = std::min(b, sum_by_class[cls] / double(cnt));
        }
        double m = std::max(a, b);
        s_sum += m > 0.0 ? (b - a) / m : 0.0;
    }
    rep.silhouette = s_sum / double(n);
    return rep;
}

} // namespace sonic
