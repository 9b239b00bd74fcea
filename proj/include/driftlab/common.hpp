#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftlab {

using Vec = std::vector<double>;

// Error taxonomy; the CLI maps these to exit codes (config 2, numeric 3).
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ordered frames sharing one dimension. Latent chunks, pixel chunks and pose
// tracks all use this layout; aliases keep signatures readable.
struct Chunk {
    int dim = 0;
    std::vector<Vec> frames;

    Chunk() = default;
    Chunk(int len, int d) : dim(d), frames(len, Vec(d, 0.0)) {}

    int len() const { return static_cast<int>(frames.size()); }

    static Chunk zeros(int len, int d) { return Chunk(len, d); }
};

using LatentChunk = Chunk;
using PixelChunk = Chunk;
using PoseTrack = Chunk;

inline void check_same_shape(const Chunk& a, const Chunk& b, const char* where) {
    if (a.dim != b.dim || a.len() != b.len()) {
        throw DimensionError(std::string(where) + ": shape mismatch (" +
                             std::to_string(a.len()) + "x" + std::to_string(a.dim) + " vs " +
                             std::to_string(b.len()) + "x" + std::to_string(b.dim) + ")");
    }
}

inline void check_dim(const Vec& v, int dim, const char* where) {
    if (static_cast<int>(v.size()) != dim) {
        throw DimensionError(std::string(where) + ": vector dimension " +
                             std::to_string(v.size()) + ", expected " + std::to_string(dim));
    }
}

inline Chunk sub(const Chunk& a, const Chunk& b) {
    check_same_shape(a, b, "sub");
    Chunk out = a;
    for (int f = 0; f < a.len(); ++f)
        for (int i = 0; i < a.dim; ++i) out.frames[f][i] -= b.frames[f][i];
    return out;
}

inline Chunk add(const Chunk& a, const Chunk& b) {
    check_same_shape(a, b, "add");
    Chunk out = a;
    for (int f = 0; f < a.len(); ++f)
        for (int i = 0; i < a.dim; ++i) out.frames[f][i] += b.frames[f][i];
    return out;
}

inline Chunk scale(const Chunk& a, double s) {
    Chunk out = a;
    for (auto& fr : out.frames)
        for (double& x : fr) x *= s;
    return out;
}

// dst += s * x
inline void axpy(Chunk& dst, double s, const Chunk& x) {
    check_same_shape(dst, x, "axpy");
    for (int f = 0; f < dst.len(); ++f)
        for (int i = 0; i < dst.dim; ++i) dst.frames[f][i] += s * x.frames[f][i];
}

inline double dot(const Chunk& a, const Chunk& b) {
    check_same_shape(a, b, "dot");
    double s = 0;
    for (int f = 0; f < a.len(); ++f)
        for (int i = 0; i < a.dim; ++i) s += a.frames[f][i] * b.frames[f][i];
    return s;
}

inline double l2_norm(const Chunk& a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(const Chunk& a, const Chunk& b) {
    check_same_shape(a, b, "max_abs_diff");
    double m = 0;
    for (int f = 0; f < a.len(); ++f)
        for (int i = 0; i < a.dim; ++i) m = std::max(m, std::abs(a.frames[f][i] - b.frames[f][i]));
    return m;
}

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool all_finite(const Chunk& c) {
    for (const auto& f : c.frames)
        if (!all_finite(f)) return false;
    return true;
}

inline double l2_norm(const Vec& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double vec_dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace driftlab
