#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "driftlab/codec.hpp"
#include "driftlab/common.hpp"
#include "driftlab/memory.hpp"
#include "driftlab/synth.hpp"

namespace driftlab {

struct SamplerConfig {
    int steps = 20;  // Euler steps, no guidance
    uint64_t seed = 0;
};

// Velocity callback for one chunk; the trained field and the test oracles
// both plug in here.
using VelocityFn = std::function<LatentChunk(const memory::ModelInput&, double)>;

// Velocity callback across a rollout; chunk_index lets oracles look up the
// ground truth of the chunk being generated.
using ChunkVelocityFn = std::function<LatentChunk(const memory::ModelInput&, double, int)>;

// Seeded standard-normal chunk; chunk_index selects a disjoint counter range
// of the same stream.
LatentChunk draw_initial_noise(int t_z, int dim, uint64_t sampler_seed, int chunk_index = 0);

// Euler integration of dx/dt = v(H_t, t) from (state, t_start) to t = 1 over
// `steps` uniform steps. The pose is re-injected into the state at every step
// before the field is evaluated.
LatentChunk integrate_from(const VelocityFn& velocity, const memory::PoseAdapter& adapter,
                           const memory::ContextMemory& ctx, const PoseTrack& poses,
                           LatentChunk state, double t_start, int steps);

// Full chunk sample: x0 ~ N(0, I) integrated over cfg.steps from t = 0.
LatentChunk sample_chunk(const VelocityFn& velocity, const memory::PoseAdapter& adapter,
                         const memory::ContextMemory& ctx, const PoseTrack& poses,
                         const SamplerConfig& cfg, int chunk_index = 0);

enum class RolloutMode { image_carryover, sink, latent_plp, latent_plp_rfm };

RolloutMode parse_rollout_mode(const std::string& name);
std::string rollout_mode_name(RolloutMode mode);
bool mode_propagates_latents(RolloutMode mode);

struct RolloutConfig {
    RolloutMode mode = RolloutMode::latent_plp_rfm;
    int chunks = 8;            // N
    int frames_per_chunk = 6;  // L == T_z
    int r = 1;                 // motion memory slices
    int K = 4;                 // identity memory size
    int m = 1;                 // user-provided reference frames, 1 <= m <= K
};

struct ChunkTrace {
    int index = 0;
    int codec_roundtrips = 0;        // inter-chunk carry-over decode+encode cycles
    uint64_t identity_memory_hash = 0;
};

struct RolloutResult {
    std::vector<LatentChunk> latents;
    std::vector<PixelChunk> pixels;
    std::vector<ChunkTrace> trace;
    std::vector<int> identity_completion_indices;  // keyframes sampled from chunk 1
    std::vector<Vec> identity_memory;              // fixed memory used for chunks >= 2

    int total_roundtrips() const {
        int n = 0;
        for (const auto& t : trace) n += t.codec_roundtrips;
        return n;
    }
};

// m user latents plus K-m keyframes sampled uniformly without replacement
// from the decoded first chunk; fixed for the rest of the rollout.
std::vector<Vec> complete_identity_memory(const std::vector<Vec>& user_ref_latents,
                                          const PixelChunk& first_chunk, int K, int m,
                                          const LossyCodec& codec, rng::Sequence& rng,
                                          std::vector<int>* picked = nullptr);

// Chunk-by-chunk generation under the configured carry-over strategy.
// Chunk 1 is generated from the reference frame(s) with zero-padded motion
// memory in every mode; image-space modes then carry the re-encoded last
// decoded frame (one round-trip per boundary) while latent modes propagate
// the last r latent slices with no codec calls.
RolloutResult rollout(const ChunkVelocityFn& velocity, const memory::PoseAdapter& adapter,
                      const synth::World& world, const synth::Scene& scene,
                      const LossyCodec& codec, const RolloutConfig& rcfg,
                      const SamplerConfig& scfg);

}  // namespace driftlab
