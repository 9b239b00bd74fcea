#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "driftlab/codec.hpp"
#include "driftlab/common.hpp"
#include "driftlab/rng.hpp"

namespace driftlab::memory {

// Context block of temporal length T_z: motion slices, identity latents,
// trailing zero pad. An optional sink latent occupies the first pad slot.
// Immutable once assembled; safe to share across concurrent samplers.
struct ContextMemory {
    int dim = 0;
    std::vector<Vec> motion;    // last r latent slices of the previous chunk
    std::vector<Vec> identity;  // K keyframe latents, fixed across chunks
    int pad = 0;                // zero slots to reach T_z
    std::optional<Vec> sink;    // persistent reference latent, first pad slot

    int total_len() const {
        return static_cast<int>(motion.size() + identity.size()) + pad;
    }
    // slot `pos` of the assembled block (zero vector for untouched pad slots)
    Vec slice(int pos) const;
    LatentChunk as_chunk() const;
    uint64_t identity_hash() const;
};

// Last r latent slices of the previous chunk; no codec involved.
std::vector<Vec> build_motion_memory(const LatentChunk& prev_latents, int r);

// Identity-preserving augmentation: cyclic coordinate shift of up to
// magnitude*floor(dim/16) positions plus rescale of the deviation from the
// frame mean by a factor in [1 - 0.1 m, 1 + 0.1 m]. Magnitude 0 is a no-op.
Vec identity_augment(const Vec& frame, double magnitude, rng::Sequence& rng);

// K distinct frames sampled uniformly without replacement, optionally pushed
// through identity_augment, then encoded. augment_rng may be null when
// augment is off; selection draws always come from select_rng so toggling
// augmentation does not shift any other stream.
std::vector<Vec> build_identity_memory(const PixelChunk& chunk_frames, int K,
                                       const LossyCodec& codec, bool augment,
                                       double augment_magnitude, rng::Sequence& select_rng,
                                       rng::Sequence* augment_rng,
                                       std::vector<int>* picked_indices = nullptr);

ContextMemory assemble_context(std::vector<Vec> motion, std::vector<Vec> identity, int t_z);

// Per-frame linear map from pose space into latent space.
struct PoseAdapter {
    int pose_dim = 0;
    int latent_dim = 0;
    std::vector<Vec> weights;  // latent_dim rows of pose_dim
    Vec bias;

    static PoseAdapter seeded(int pose_dim, int latent_dim, uint64_t seed, double weight_scale);
    static PoseAdapter zero(int pose_dim, int latent_dim);

    Vec apply(const Vec& pose) const;
    bool is_zero() const;
};

LatentChunk inject_pose(const LatentChunk& xt, const PoseTrack& poses, const PoseAdapter& adapter);

// Final model input: pose-injected target in channels [0,d), context block in
// channels [d,2d), per temporal position.
struct ModelInput {
    LatentChunk target;
    ContextMemory context;
    double t = 0;
};

ModelInput concat_channels(LatentChunk target, ContextMemory ctx, double t);

}  // namespace driftlab::memory
