#include "driftlab/memory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace driftlab::memory {

Vec ContextMemory::slice(int pos) const {
    const int r = static_cast<int>(motion.size());
    const int k = static_cast<int>(identity.size());
    if (pos < 0 || pos >= total_len())
        throw DimensionError("context slice " + std::to_string(pos) + " out of range");
    if (pos < r) return motion[pos];
    if (pos < r + k) return identity[pos - r];
    if (sink && pos == r + k) return *sink;
    return Vec(dim, 0.0);
}

LatentChunk ContextMemory::as_chunk() const {
    LatentChunk out(total_len(), dim);
    for (int p = 0; p < total_len(); ++p) out.frames[p] = slice(p);
    return out;
}

uint64_t ContextMemory::identity_hash() const {
    uint64_t h = rng::kFnvOffset;
    for (const Vec& f : identity)
        h = rng::fnv1a_bytes(f.data(), f.size() * sizeof(double), h);
    return h;
}

std::vector<Vec> build_motion_memory(const LatentChunk& prev_latents, int r) {
    if (r < 0 || r > prev_latents.len())
        throw ConfigError("motion memory: r=" + std::to_string(r) + " exceeds chunk length " +
                          std::to_string(prev_latents.len()));
    std::vector<Vec> out;
    out.reserve(r);
    for (int f = prev_latents.len() - r; f < prev_latents.len(); ++f)
        out.push_back(prev_latents.frames[f]);
    return out;
}

Vec identity_augment(const Vec& frame, double magnitude, rng::Sequence& rng) {
    if (magnitude == 0.0) return frame;
    const int d = static_cast<int>(frame.size());
    const int max_shift = static_cast<int>(std::lround(magnitude * (d / 16)));
    const int shift = max_shift > 0 ? rng.uniform_int(-max_shift, max_shift) : (rng.next_word(), 0);
    const double alpha = rng.uniform(1.0 - 0.1 * magnitude, 1.0 + 0.1 * magnitude);

    Vec shifted(d);
    for (int i = 0; i < d; ++i) shifted[i] = frame[((i - shift) % d + d) % d];
    const double mean = std::accumulate(shifted.begin(), shifted.end(), 0.0) / d;
    for (double& x : shifted) x = mean + alpha * (x - mean);
    return shifted;
}

std::vector<Vec> build_identity_memory(const PixelChunk& chunk_frames, int K,
                                       const LossyCodec& codec, bool augment,
                                       double augment_magnitude, rng::Sequence& select_rng,
                                       rng::Sequence* augment_rng,
                                       std::vector<int>* picked_indices) {
    const int n = chunk_frames.len();
    if (K < 1 || K > n)
        throw ConfigError("identity memory: K=" + std::to_string(K) +
                          " exceeds chunk length " + std::to_string(n));
    // uniform sample without replacement (partial Fisher-Yates)
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < K; ++i) std::swap(idx[i], idx[select_rng.uniform_int(i, n - 1)]);
    idx.resize(K);
    if (picked_indices) *picked_indices = idx;

    std::vector<Vec> out;
    out.reserve(K);
    for (int i : idx) {
        Vec frame = chunk_frames.frames[i];
        if (augment && augment_rng) frame = identity_augment(frame, augment_magnitude, *augment_rng);
        out.push_back(codec.encode(frame));
    }
    return out;
}

ContextMemory assemble_context(std::vector<Vec> motion, std::vector<Vec> identity, int t_z) {
    const int used = static_cast<int>(motion.size() + identity.size());
    if (used > t_z)
        throw ConfigError("context overflow: r+K=" + std::to_string(used) + " exceeds T_z=" +
                          std::to_string(t_z));
    ContextMemory ctx;
    ctx.dim = !motion.empty() ? static_cast<int>(motion.front().size())
                              : (!identity.empty() ? static_cast<int>(identity.front().size()) : 0);
    for (const Vec& f : motion) check_dim(f, ctx.dim, "context motion");
    for (const Vec& f : identity) check_dim(f, ctx.dim, "context identity");
    ctx.motion = std::move(motion);
    ctx.identity = std::move(identity);
    ctx.pad = t_z - used;
    return ctx;
}

PoseAdapter PoseAdapter::seeded(int pose_dim, int latent_dim, uint64_t seed, double weight_scale) {
    PoseAdapter a;
    a.pose_dim = pose_dim;
    a.latent_dim = latent_dim;
    rng::Sequence rng(seed);
    const double s = weight_scale / std::sqrt(static_cast<double>(pose_dim));
    a.weights.assign(latent_dim, Vec(pose_dim));
    for (auto& row : a.weights)
        for (double& w : row) w = s * rng.gauss();
    a.bias.assign(latent_dim, 0.0);
    return a;
}

PoseAdapter PoseAdapter::zero(int pose_dim, int latent_dim) {
    PoseAdapter a;
    a.pose_dim = pose_dim;
    a.latent_dim = latent_dim;
    a.weights.assign(latent_dim, Vec(pose_dim, 0.0));
    a.bias.assign(latent_dim, 0.0);
    return a;
}

Vec PoseAdapter::apply(const Vec& pose) const {
    check_dim(pose, pose_dim, "pose adapter");
    Vec out(latent_dim);
    for (int i = 0; i < latent_dim; ++i) out[i] = vec_dot(weights[i], pose) + bias[i];
    return out;
}

bool PoseAdapter::is_zero() const {
    for (const auto& row : weights)
        for (double w : row)
            if (w != 0.0) return false;
    for (double b : bias)
        if (b != 0.0) return false;
    return true;
}

LatentChunk inject_pose(const LatentChunk& xt, const PoseTrack& poses, const PoseAdapter& adapter) {
    if (poses.len() != xt.len())
        throw DimensionError("inject_pose: " + std::to_string(poses.len()) + " poses for " +
                             std::to_string(xt.len()) + " latent slices");
    LatentChunk out = xt;
    for (int f = 0; f < xt.len(); ++f) {
        const Vec p = adapter.apply(poses.frames[f]);
        for (int i = 0; i < xt.dim; ++i) out.frames[f][i] += p[i];
    }
    return out;
}

ModelInput concat_channels(LatentChunk target, ContextMemory ctx, double t) {
    if (ctx.total_len() != target.len())
        throw DimensionError("concat_channels: context length " + std::to_string(ctx.total_len()) +
                             " vs target length " + std::to_string(target.len()));
    if (ctx.dim != 0 && ctx.dim != target.dim)
        throw DimensionError("concat_channels: context dim " + std::to_string(ctx.dim) +
                             " vs target dim " + std::to_string(target.dim));
    if (ctx.dim == 0) ctx.dim = target.dim;  // all-pad context
    ModelInput in;
    in.target = std::move(target);
    in.context = std::move(ctx);
    in.t = t;
    return in;
}

}  // namespace driftlab::memory
