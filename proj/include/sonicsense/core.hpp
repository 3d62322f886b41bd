#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sonic {

// Thrown on violated preconditions and malformed inputs.
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on filesystem / parse failures, with position info where available.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// ---------------------------------------------------------------------------
// Small fixed-size linear algebra, enough for kinematics and mesh work.
// ---------------------------------------------------------------------------

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    double norm2() const { return dot(*this); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw InvalidInput("cannot normalize zero vector");
        return *this / n;
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Mat3 {
    // Row-major.
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Mat3 identity() { return Mat3{}; }

    static Mat3 rot_x(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return Mat3{{1, 0, 0, 0, c, -s, 0, s, c}};
    }
    // Right-handed rotation about +y.
    static Mat3 rot_y(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return Mat3{{c, 0, s, 0, 1, 0, -s, 0, c}};
    }
    static Mat3 rot_z(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        return Mat3{{c, -s, 0, s, c, 0, 0, 0, 1}};
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += m[i * 3 + k] * o.m[k * 3 + j];
                r.m[i * 3 + j] = s;
            }
        return r;
    }
    Mat3 transposed() const {
        return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
    }
    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
};

// Rigid transform stored as rotation + translation of a 4x4 homogeneous matrix.
struct Transform {
    Mat3 rot;
    Vec3 trans;

    static Transform identity() { return {}; }
    static Transform translation(const Vec3& t) { return {Mat3::identity(), t}; }

    // 16 row-major numbers of the homogeneous matrix.
    static Transform from_rows(const std::array<double, 16>& a) {
        Transform t;
        t.rot.m = {a[0], a[1], a[2], a[4], a[5], a[6], a[8], a[9], a[10]};
        t.trans = {a[3], a[7], a[11]};
        return t;
    }
    std::array<double, 16> to_rows() const {
        const auto& r = rot.m;
        return {r[0], r[1], r[2], trans.x,
                r[3], r[4], r[5], trans.y,
                r[6], r[7], r[8], trans.z,
                0,    0,    0,    1};
    }

    Vec3 apply(const Vec3& p) const { return rot * p + trans; }

    // deviation of R^T R from identity, max-abs entry
    double orthonormality_error() const {
        Mat3 e = rot.transposed() * rot;
        double err = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                err = std::max(err, std::abs(e.m[i * 3 + j] - (i == j ? 1.0 : 0.0)));
        return err;
    }
    bool is_rigid(double tol = 1e-9) const {
        return orthonormality_error() < tol && rot.det() > 0.0;
    }
};

// ---------------------------------------------------------------------------
// Deterministic RNG. xoshiro256++ seeded via splitmix64, with explicit
// uniform / normal transforms so sequences are pinned independent of the
// standard library's distribution implementations.
// ---------------------------------------------------------------------------

class Rng {
public:
    explicit Rng(uint64_t seed = 0) {
        uint64_t s = seed;
        for (auto& w : state_) w = splitmix64(s);
        has_spare_ = false;
    }

    uint64_t next_u64() {
        uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0, 1)
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t below(uint64_t n) { return next_u64() % n; }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return mean + stddev * u * f;
    }

    // Fisher-Yates shuffle
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    // k distinct indices from [0, n), order randomized
    std::vector<size_t> sample_without_replacement(size_t n, size_t k) {
        if (k > n) throw InvalidInput("sample_without_replacement: k > n");
        std::vector<size_t> idx(n);
        for (size_t i = 0; i < n; ++i) idx[i] = i;
        for (size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + below(n - i)]);
        idx.resize(k);
        return idx;
    }

private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// ---------------------------------------------------------------------------
// FNV-1a, used for config/content hashing in provenance records.
// ---------------------------------------------------------------------------

inline uint64_t fnv1a(const void* data, size_t len, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a(s.data(), s.size(), h);
}

// ---------------------------------------------------------------------------
// Key-value config files: `key v1 v2 ...` lines, optional [section] headers,
// '#' comments. Repeated keys accumulate (used by material mode tables).
// ---------------------------------------------------------------------------

struct KvConfig {
    // entries in file order: {section.key, values}
    std::vector<std::pair<std::string, std::vector<std::string>>> entries;

    bool has(const std::string& key) const {
        for (const auto& e : entries)
            if (e.first == key) return true;
        return false;
    }
    const std::vector<std::string>& get(const std::string& key) const {
        for (const auto& e : entries)
            if (e.first == key) return e.second;
        throw InvalidInput("config key missing: " + key);
    }
    double get_double(const std::string& key) const {
        const auto& v = get(key);
        if (v.empty()) throw InvalidInput("config key has no value: " + key);
        return std::stod(v[0]);
    }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }

    static KvConfig parse(std::istream& in, const std::string& origin = "<stream>") {
        KvConfig cfg;
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string key;
            if (!(ls >> key)) continue;
            if (key.front() == '[') {
                if (key.back() != ']')
                    throw IoError(origin + ":" + std::to_string(lineno) + ": malformed section header");
                section = key.substr(1, key.size() - 2);
                continue;
            }
            std::vector<std::string> vals;
            std::string tok;
            while (ls >> tok) vals.push_back(tok);
            cfg.entries.emplace_back(section.empty() ? key : section + "." + key, std::move(vals));
        }
        return cfg;
    }

    static KvConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file: " + path);
        return parse(in, path);
    }
};

// Run `fn(i)` for i in [0, n). `jobs <= 1` runs inline; otherwise a simple
// index-striped thread pool. Results must be written to per-index slots so
// the outcome is order-independent.
inline void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    size_t workers = std::min<size_t>(jobs, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (size_t i = w; i < n; i += workers) fn(i);
        });
    for (auto& t : pool) t.join();
}

} // namespace sonic
