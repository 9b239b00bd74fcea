#include "driftlab/sampler.hpp"

#include <cmath>
#include <utility>

namespace driftlab {

LatentChunk draw_initial_noise(int t_z, int dim, uint64_t sampler_seed, int chunk_index) {
    rng::Stream stream(rng::derive(sampler_seed, "sampler", "x0"));
    LatentChunk x(t_z, dim);
    const uint64_t base = static_cast<uint64_t>(chunk_index) * static_cast<uint64_t>(t_z) * dim;
    uint64_t c = base;
    for (auto& frame : x.frames)
        for (double& v : frame) v = stream.gauss(c++);
    return x;
}

LatentChunk integrate_from(const VelocityFn& velocity, const memory::PoseAdapter& adapter,
                           const memory::ContextMemory& ctx, const PoseTrack& poses,
                           LatentChunk state, double t_start, int steps) {
    if (steps < 1) throw ConfigError("sampler: steps must be >= 1");
    if (!(t_start >= 0.0 && t_start < 1.0))
        throw DomainError("sampler: t_start outside [0,1)");
    const double dt = (1.0 - t_start) / steps;
    for (int k = 0; k < steps; ++k) {
        const double t = t_start + k * dt;
        LatentChunk injected = memory::inject_pose(state, poses, adapter);
        memory::ModelInput input = memory::concat_channels(std::move(injected), ctx, t);
        const LatentChunk v = velocity(input, t);
        check_same_shape(state, v, "sampler velocity");
        axpy(state, dt, v);
        if (!all_finite(state))
            throw NumericError("sampler: non-finite state at step " + std::to_string(k));
    }
    return state;
}

LatentChunk sample_chunk(const VelocityFn& velocity, const memory::PoseAdapter& adapter,
                         const memory::ContextMemory& ctx, const PoseTrack& poses,
                         const SamplerConfig& cfg, int chunk_index) {
    LatentChunk x0 = draw_initial_noise(ctx.total_len(), ctx.dim, cfg.seed, chunk_index);
    return integrate_from(velocity, adapter, ctx, poses, std::move(x0), 0.0, cfg.steps);
}

RolloutMode parse_rollout_mode(const std::string& name) {
    if (name == "image_carryover") return RolloutMode::image_carryover;
    if (name == "sink") return RolloutMode::sink;
    if (name == "latent_plp") return RolloutMode::latent_plp;
    if (name == "latent_plp_rfm") return RolloutMode::latent_plp_rfm;
    throw ConfigError("unknown rollout mode: " + name);
}

std::string rollout_mode_name(RolloutMode mode) {
    switch (mode) {
        case RolloutMode::image_carryover: return "image_carryover";
        case RolloutMode::sink: return "sink";
        case RolloutMode::latent_plp: return "latent_plp";
        case RolloutMode::latent_plp_rfm: return "latent_plp_rfm";
    }
    return "?";
}

bool mode_propagates_latents(RolloutMode mode) {
    return mode == RolloutMode::latent_plp || mode == RolloutMode::latent_plp_rfm;
}

std::vector<Vec> complete_identity_memory(const std::vector<Vec>& user_ref_latents,
                                          const PixelChunk& first_chunk, int K, int m,
                                          const LossyCodec& codec, rng::Sequence& rng,
                                          std::vector<int>* picked) {
    if (m < 1 || m > K)
        throw ConfigError("identity completion: m=" + std::to_string(m) + " outside [1, K=" +
                          std::to_string(K) + "]");
    if (static_cast<int>(user_ref_latents.size()) != m)
        throw ConfigError("identity completion: expected m reference latents");
    std::vector<Vec> mem = user_ref_latents;
    if (m == K) {
        if (picked) picked->clear();
        return mem;  // user references are the whole memory
    }
    const int n = first_chunk.len();
    if (K - m > n) throw ConfigError("identity completion: K-m exceeds first chunk length");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < K - m; ++i) std::swap(idx[i], idx[rng.uniform_int(i, n - 1)]);
    idx.resize(K - m);
    if (picked) *picked = idx;
    for (int i : idx) mem.push_back(codec.encode(first_chunk.frames[i]));
    return mem;
}

namespace {

void validate_rollout_config(const RolloutConfig& rcfg, const synth::Scene& scene) {
    const int t_z = rcfg.frames_per_chunk;
    if (rcfg.chunks < 1) throw ConfigError("rollout: chunks must be >= 1");
    if (scene.frames_per_chunk != rcfg.frames_per_chunk)
        throw ConfigError("rollout: scene chunk length " + std::to_string(scene.frames_per_chunk) +
                          " does not match config " + std::to_string(rcfg.frames_per_chunk));
    if (scene.total_frames() != rcfg.chunks * rcfg.frames_per_chunk)
        throw ConfigError("rollout: scene has " + std::to_string(scene.total_frames()) +
                          " frames, config needs " + std::to_string(rcfg.chunks * t_z));
    if (rcfg.r < 0 || rcfg.K < 1 || rcfg.r + rcfg.K > t_z)
        throw ConfigError("rollout: r+K must fit in T_z");
    if (rcfg.m < 1 || rcfg.m > rcfg.K) throw ConfigError("rollout: m must lie in [1, K]");
    if (rcfg.m > rcfg.frames_per_chunk)
        throw ConfigError("rollout: m exceeds frames available in chunk 1");
    if (!mode_propagates_latents(rcfg.mode) && rcfg.r < 1)
        throw ConfigError("rollout: image-space carry-over needs a motion slot (r >= 1)");
    if (rcfg.mode == RolloutMode::sink && rcfg.r + rcfg.K + 1 > t_z)
        throw ConfigError("rollout: sink mode needs a free pad slot (r+K+1 <= T_z)");
}

}  // namespace

RolloutResult rollout(const ChunkVelocityFn& velocity, const memory::PoseAdapter& adapter,
                      const synth::World& world, const synth::Scene& scene,
                      const LossyCodec& codec, const RolloutConfig& rcfg,
                      const SamplerConfig& scfg) {
    validate_rollout_config(rcfg, scene);
    const int t_z = rcfg.frames_per_chunk;
    const int d = codec.dim();
    const int N = rcfg.chunks;
    const bool latent_mode = mode_propagates_latents(rcfg.mode);

    // user reference frames: m ground-truth frames spread over chunk 1
    std::vector<Vec> ref_latents;
    for (int j = 0; j < rcfg.m; ++j) {
        const int ell = j * rcfg.frames_per_chunk / rcfg.m;
        ref_latents.push_back(codec.encode(world.render_frame(scene, ell)));
    }
    const Vec sink_latent = ref_latents.front();  // E(I_ref)

    rng::Sequence completion_rng(rng::derive(scfg.seed, "rollout", "identity-completion"));
    uint64_t decode_key = 1;  // shared counter for every decode in this rollout

    RolloutResult res;
    std::vector<Vec> fixed_identity;  // latent modes, chunks >= 2
    for (int n = 0; n < N; ++n) {
        std::vector<Vec> motion(rcfg.r, Vec(d, 0.0));  // chunk 1: zero-padded motion
        std::vector<Vec> identity;
        int roundtrips = 0;
        if (n == 0) {
            identity = ref_latents;
            identity.resize(rcfg.K, Vec(d, 0.0));  // remaining slots stay null until completed
        } else if (latent_mode) {
            motion = memory::build_motion_memory(res.latents[n - 1], rcfg.r);
            identity = fixed_identity;
        } else {
            // image-space carry-over: re-encode the last decoded frame of the
            // previous chunk (single-frame carry-over, one round-trip)
            motion[0] = codec.encode(res.pixels[n - 1].frames.back());
            roundtrips = 1;
            identity.assign(rcfg.K, Vec(d, 0.0));
        }
        memory::ContextMemory ctx = memory::assemble_context(std::move(motion), std::move(identity), t_z);
        ctx.dim = d;
        if (rcfg.mode == RolloutMode::sink && n > 0) ctx.sink = sink_latent;

        VelocityFn chunk_velocity = [&velocity, n](const memory::ModelInput& in, double t) {
            return velocity(in, t, n);
        };
        const PoseTrack poses = world.chunk_poses(scene, n);
        LatentChunk latents = sample_chunk(chunk_velocity, adapter, ctx, poses, scfg, n);
        PixelChunk pixels = decode_chunk(codec, latents, decode_key);
        decode_key += static_cast<uint64_t>(t_z);

        res.trace.push_back({n, roundtrips, ctx.identity_hash()});
        res.latents.push_back(std::move(latents));
        res.pixels.push_back(std::move(pixels));

        if (n == 0 && latent_mode) {
            fixed_identity = complete_identity_memory(ref_latents, res.pixels[0], rcfg.K, rcfg.m,
                                                      codec, completion_rng,
                                                      &res.identity_completion_indices);
            res.identity_memory = fixed_identity;
        }
    }
    return res;
}

}  // namespace driftlab
