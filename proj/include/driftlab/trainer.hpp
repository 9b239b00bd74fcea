#pragma once

#include <cstdint>
#include <vector>

#include "driftlab/codec.hpp"
#include "driftlab/common.hpp"
#include "driftlab/field.hpp"
#include "driftlab/flow.hpp"
#include "driftlab/memory.hpp"
#include "driftlab/synth.hpp"

namespace driftlab {

struct TrainConfig {
    int stage1_iters = 400;  // memory adaptation, standard FM targets
    int stage2_iters = 100;  // anti-drift adaptation, restorative targets
    int batch_size = 16;
    double lr = 1e-3;
    double beta = flow::kDefaultBeta;  // lambda(t) sharpness
    double perturb_max = 0.15;         // magnitude drawn uniform in [0, perturb_max]
    bool augment_identity = true;
    double augment_magnitude = 1.0;
    int r = 1;
    int K = 4;
    uint64_t seed = 0;
};

// One training example built from two adjacent chunks of a scene. Stage 1
// perturbs the motion memory and uses the plain FM velocity; stage 2 keeps the
// motion memory clean, perturbs the target endpoint, and uses the rescheduled
// restorative velocity. The provenance flags let tests assert the separation.
struct TrainSample {
    memory::ModelInput input;
    LatentChunk target_velocity;
    int stage = 1;
    bool motion_perturbed = false;
    bool restorative_target = false;
    double t = 0;
    LatentChunk clean_x1;  // clean endpoint of the target chunk
};

TrainSample make_stage1_sample(const synth::World& world, const synth::Scene& scene,
                               const LossyCodec& codec, const memory::PoseAdapter& adapter,
                               const TrainConfig& cfg, uint64_t sample_index);

TrainSample make_stage2_sample(const synth::World& world, const synth::Scene& scene,
                               const LossyCodec& codec, const memory::PoseAdapter& adapter,
                               const TrainConfig& cfg, uint64_t sample_index);

struct TrainResult {
    struct Point {
        int iteration;  // global, stage 1 then stage 2
        int stage;
        double loss;
    };
    std::vector<Point> curve;

    double stage_mean_first_decile(int stage) const;
    double stage_mean_last_decile(int stage) const;
};

// Two-stage progressive training. Non-finite batch loss raises NumericError
// with the iteration index.
TrainResult train(VectorField& field, const synth::World& world,
                  const std::vector<synth::Scene>& scenes, const LossyCodec& codec,
                  const memory::PoseAdapter& adapter, const TrainConfig& cfg);

}  // namespace driftlab
