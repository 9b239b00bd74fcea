#pragma once

#include <string>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/field.hpp"
#include "driftlab/sampler.hpp"
#include "driftlab/synth.hpp"
#include "driftlab/trainer.hpp"

namespace driftlab::metrics {

// Drift metrics split the per-chunk error into a static part (background) and
// a dynamic part (character), plus the recovered identity code:
//   background_mse  distance between the chunk's static-component estimate
//                   (temporal mean of generated minus true character) and the
//                   true background, per coordinate
//   character_mse   residual of the dynamic component against the true
//                   character render, per coordinate
//   identity_mse    distance between the identity code recovered by least
//                   squares from the character residuals and the true code
//   psnr_analog     -10 log10(frame MSE); +inf sentinel when the MSE is zero
struct ChunkMetrics {
    int chunk_index = 0;
    double background_mse = 0;
    double character_mse = 0;
    double identity_mse = 0;
    double psnr_analog = 0;
};

struct DriftReport {
    std::vector<ChunkMetrics> chunks;
    double background_slope = 0;  // OLS slope of the metric vs chunk index
    double character_slope = 0;
    double identity_slope = 0;
};

// OLS slope of y against x = 0..n-1.
double ols_slope(const std::vector<double>& y);

// Least-squares inversion of the render map: the identity code minimizing
// sum_l || G(pose_l) id - residual_l ||^2 over one chunk.
Vec recover_identity(const synth::World& world, const synth::Scene& scene, int chunk_index,
                     const std::vector<Vec>& residual_frames);

DriftReport drift_report(const std::vector<PixelChunk>& generated, const synth::World& world,
                         const synth::Scene& scene);

// Mean |Pearson correlation| between each fixed identity-memory latent and the
// generated latent at the same context position, over chunks >= 2. The
// statistic behind the context-bias comparison.
double context_bias_statistic(const std::vector<RolloutResult>& rollouts, int r, int K);

struct PresetResult {
    std::string name;
    RolloutMode mode;
    bool rfm_trained = false;
    std::vector<DriftReport> per_scene;

    double mean_background_slope() const;
    double mean_character_slope() const;
    double mean_identity_slope() const;
};

struct AblationTable {
    std::vector<PresetResult> presets;  // baseline, wo_rfm, wo_plp, full
};

// sampler sub-seeds averaged into each scene's drift report
inline constexpr int kRolloutsPerScene = 4;

// Four presets over the same scenes and seeds:
//   baseline  image_carryover rollout, FM-trained model
//   wo_rfm    latent rollout, FM-trained model
//   wo_plp    image_carryover rollout, RFM-trained model
//   full      latent rollout, RFM-trained model
// `parallel` runs the presets on separate threads; results are identical to
// the sequential order either way.
AblationTable ablation_suite(const ChunkVelocityFn& fm_model, const ChunkVelocityFn& rfm_model,
                             const memory::PoseAdapter& adapter, const synth::World& world,
                             const std::vector<synth::Scene>& scenes, const LossyCodec& codec,
                             const RolloutConfig& rcfg_base, const SamplerConfig& scfg,
                             bool parallel = false);

// Integrates both fields from the same perturbed mid-trajectory states to t=1
// and reports each field's mean endpoint distance to the clean endpoint,
// averaged over `draws` paired perturbation/noise draws.
struct RestorationProbe {
    double error_a = 0;
    double error_b = 0;
};

RestorationProbe restoration_probe(const VectorField& field_a, const VectorField& field_b,
                                   const synth::World& world, const synth::Scene& scene,
                                   const LossyCodec& codec, const memory::PoseAdapter& adapter,
                                   const TrainConfig& tcfg, double t_start, int steps, int draws,
                                   uint64_t probe_seed);

}  // namespace driftlab::metrics
