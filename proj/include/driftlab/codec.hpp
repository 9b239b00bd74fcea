#pragma once

#include <atomic>
#include <cstdint>

#include "driftlab/common.hpp"
#include "driftlab/rng.hpp"

namespace driftlab {

// Lossy autoencoder surrogate. Encoding is an orthogonal affine map z = A x + b
// (A drawn once from the seed); decoding inverts it and then applies the
// round-trip loss x' = mu + gamma (x - mu) + eta, eta ~ N(0, sigma^2). With
// gamma = 1 and sigma = 0 the codec is lossless. Noise is drawn from a
// counter-based stream keyed by an explicit per-call index, so results are
// reproducible regardless of call order.
class LossyCodec {
public:
    struct Params {
        int dim = 32;  // pixel dimension == latent dimension
        double gamma = 0.97;
        double noise_sigma = 0.005;
        Vec mu;  // codec mean in pixel space; empty means zero
        uint64_t seed = 0;
    };

    explicit LossyCodec(Params p);

    Vec encode(const Vec& frame) const;
    Vec decode(const Vec& latent, uint64_t noise_key = 0) const;

    // || (D∘E)^k(frame) - frame ||_2 for k = 1..n. Round-trip k uses noise key k.
    std::vector<double> roundtrip_error_curve(const Vec& frame, int n) const;

    double gamma() const { return p_.gamma; }
    double noise_sigma() const { return p_.noise_sigma; }
    const Vec& mu() const { return p_.mu; }
    int dim() const { return p_.dim; }
    const std::vector<Vec>& matrix() const { return a_; }
    const Vec& offset() const { return b_; }

    // call counters; used to assert that latent propagation stays codec-free
    uint64_t encode_calls() const { return encode_calls_.load(); }
    uint64_t decode_calls() const { return decode_calls_.load(); }

private:
    Params p_;
    std::vector<Vec> a_;   // rows of A (orthogonal)
    Vec b_;
    rng::Stream noise_;
    mutable std::atomic<uint64_t> encode_calls_{0};
    mutable std::atomic<uint64_t> decode_calls_{0};
};

LatentChunk encode_chunk(const LossyCodec& codec, const PixelChunk& frames);
PixelChunk decode_chunk(const LossyCodec& codec, const LatentChunk& latents, uint64_t noise_key_base);

}  // namespace driftlab
