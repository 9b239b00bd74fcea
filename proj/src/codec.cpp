#include "driftlab/codec.hpp"

#include <cmath>
#include <utility>

namespace driftlab {

namespace {

// Orthogonal matrix from a seeded Gaussian draw, modified Gram-Schmidt with a
// second pass. Orthogonality makes the inverse exact (the transpose), so a
// gamma=1, sigma=0 codec round-trips to ~1e-15.
std::vector<Vec> orthogonal_matrix(int dim, uint64_t key) {
    rng::Sequence rng(key);
    std::vector<Vec> q(dim, Vec(dim));
    for (int i = 0; i < dim; ++i) {
        Vec v(dim);
        double norm = 0;
        do {
            for (int j = 0; j < dim; ++j) v[j] = rng.gauss();
            for (int pass = 0; pass < 2; ++pass) {
                for (int k = 0; k < i; ++k) {
                    const double proj = vec_dot(v, q[k]);
                    for (int j = 0; j < dim; ++j) v[j] -= proj * q[k][j];
                }
            }
            norm = l2_norm(v);
        } while (norm < 1e-8);
        for (int j = 0; j < dim; ++j) q[i][j] = v[j] / norm;
    }
    return q;
}

}  // namespace

LossyCodec::LossyCodec(Params p)
    : p_(std::move(p)), noise_(rng::derive(p_.seed, "codec", "decode-noise")) {
    if (p_.dim < 1) throw ConfigError("codec: dim must be >= 1");
    if (!(p_.gamma > 0.0 && p_.gamma <= 1.0))
        throw ConfigError("codec: gamma must lie in (0,1]");
    if (p_.noise_sigma < 0.0) throw ConfigError("codec: noise_sigma must be >= 0");
    if (p_.mu.empty()) p_.mu.assign(p_.dim, 0.0);
    check_dim(p_.mu, p_.dim, "codec mu");

    a_ = orthogonal_matrix(p_.dim, rng::derive(p_.seed, "codec", "affine"));
    rng::Sequence brng(rng::derive(p_.seed, "codec", "offset"));
    b_.resize(p_.dim);
    for (double& x : b_) x = 0.3 * brng.gauss();
}

Vec LossyCodec::encode(const Vec& frame) const {
    check_dim(frame, p_.dim, "encode");
    encode_calls_.fetch_add(1, std::memory_order_relaxed);
    Vec z(p_.dim);
    for (int i = 0; i < p_.dim; ++i) z[i] = vec_dot(a_[i], frame) + b_[i];
    return z;
}

Vec LossyCodec::decode(const Vec& latent, uint64_t noise_key) const {
    check_dim(latent, p_.dim, "decode");
    decode_calls_.fetch_add(1, std::memory_order_relaxed);
    // A is orthogonal: inverse = transpose
    Vec x(p_.dim, 0.0);
    for (int i = 0; i < p_.dim; ++i) {
        const double zi = latent[i] - b_[i];
        for (int j = 0; j < p_.dim; ++j) x[j] += a_[i][j] * zi;
    }
    for (int j = 0; j < p_.dim; ++j) {
        double out = p_.mu[j] + p_.gamma * (x[j] - p_.mu[j]);
        if (p_.noise_sigma > 0.0)
            out += p_.noise_sigma * noise_.gauss(noise_key * static_cast<uint64_t>(p_.dim) + j);
        x[j] = out;
    }
    return x;
}

std::vector<double> LossyCodec::roundtrip_error_curve(const Vec& frame, int n) const {
    if (n < 1) throw DomainError("roundtrip_error_curve: n must be >= 1");
    check_dim(frame, p_.dim, "roundtrip_error_curve");
    std::vector<double> curve;
    curve.reserve(n);
    Vec x = frame;
    for (int k = 1; k <= n; ++k) {
        x = decode(encode(x), static_cast<uint64_t>(k));
        double s = 0;
        for (int j = 0; j < p_.dim; ++j) {
            const double d = x[j] - frame[j];
            s += d * d;
        }
        curve.push_back(std::sqrt(s));
    }
    return curve;
}

LatentChunk encode_chunk(const LossyCodec& codec, const PixelChunk& frames) {
    LatentChunk out(frames.len(), codec.dim());
    for (int f = 0; f < frames.len(); ++f) out.frames[f] = codec.encode(frames.frames[f]);
    return out;
}

PixelChunk decode_chunk(const LossyCodec& codec, const LatentChunk& latents, uint64_t noise_key_base) {
    PixelChunk out(latents.len(), codec.dim());
    for (int f = 0; f < latents.len(); ++f)
        out.frames[f] = codec.decode(latents.frames[f], noise_key_base + static_cast<uint64_t>(f));
    return out;
}

}  // namespace driftlab
