#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/rng.hpp"

namespace driftlab::synth {

struct SceneParams {
    int pixel_dim = 32;
    int pose_dim = 4;
    int identity_dim = 8;
    int chunks = 8;           // N
    int frames_per_chunk = 6;  // L
    double pose_step = 0.15;   // random-walk increment scale
    double pose_clip = 2.0;
    int char_features = 32;    // sinusoidal pose features
    double char_freq = 1.0;    // feature frequency scale
    double background_scale = 1.5;  // static component amplitude; dominates pixel variance
    double char_scale = 0.5;        // per-coordinate character amplitude

    int total_frames() const { return chunks * frames_per_chunk; }
};

// Fixed smooth render map for the moving character:
//   char(identity, pose)[i] = scale * sum_{a,j} M[i][a][j] * identity[a] * f_j(pose)
// with bounded features f_j(pose) = sin(<w_j, pose> + phi_j). Linear in the
// identity code given the pose, which is what lets the metrics recover the
// identity by least squares.
class CharacterMap {
public:
    CharacterMap(int pixel_dim, int identity_dim, int pose_dim, int features, double freq_scale,
                 double scale, uint64_t seed);

    Vec render(const Vec& identity, const Vec& pose) const;

    // G(pose): pixel_dim x identity_dim matrix with render = G(pose) * identity
    std::vector<Vec> identity_basis(const Vec& pose) const;

    int pixel_dim() const { return pixel_dim_; }
    int identity_dim() const { return identity_dim_; }

private:
    Vec features(const Vec& pose) const;

    int pixel_dim_, identity_dim_, pose_dim_, n_features_;
    double scale_;
    std::vector<Vec> freq_;   // n_features rows of pose_dim
    Vec phase_;               // n_features
    std::vector<Vec> mix_;    // pixel_dim rows of identity_dim * n_features
};

struct Scene {
    Vec background;       // static component, constant across all frames
    Vec identity;         // character appearance code
    PoseTrack pose_track; // total_frames x pose_dim
    int frames_per_chunk = 0;

    int total_frames() const { return pose_track.len(); }
    int chunks() const { return frames_per_chunk > 0 ? total_frames() / frames_per_chunk : 0; }
};

// Perturbation operator families; magnitude 0 is the identity map.
//   gain    rescales deviation from the chunk mean (saturation analog)
//   offset  adds magnitude * u for a seeded unit direction u (color-shift analog)
//   smooth  blends toward a temporal moving average (sharpness analog)
//   compose picks one of the three from the seed
enum class PerturbKind { gain, offset, smooth, compose };

struct PerturbationSpec {
    PerturbKind kind = PerturbKind::compose;
    double magnitude = 0.0;
    uint64_t seed = 0;            // per-draw stream (family pick)
    uint64_t direction_seed = 0;  // offset axis; fixed per experiment
};

PerturbKind parse_perturb_kind(const std::string& name);

// The unit direction an offset spec resolves to (for inspection and tests).
Vec offset_direction(const PerturbationSpec& spec, int dim);

PixelChunk perturb(const PixelChunk& chunk, const PerturbationSpec& spec);

class World {
public:
    World(SceneParams params, uint64_t master_seed);

    Scene make_scene(uint64_t scene_seed) const;

    // ell is a 0-based frame index in [0, total_frames)
    Vec render_frame(const Scene& scene, int ell) const;

    PixelChunk render_chunk(const Scene& scene, int chunk_index) const;
    PoseTrack chunk_poses(const Scene& scene, int chunk_index) const;

    // aligned (frames, poses) pairs covering the scene in order
    std::vector<std::pair<PixelChunk, PoseTrack>> split_chunks(const Scene& scene, int L) const;

    const SceneParams& params() const { return params_; }
    const CharacterMap& character_map() const { return cmap_; }

private:
    SceneParams params_;
    CharacterMap cmap_;
};

}  // namespace driftlab::synth
