#include "driftlab/trainer.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace driftlab {

namespace {

struct SampleParts {
    PixelChunk v1_px, v2_px;
    PoseTrack v2_poses;
    LatentChunk v1_latents;
};

SampleParts adjacent_chunks(const synth::World& world, const synth::Scene& scene,
                            const LossyCodec& codec, rng::Sequence& seq) {
    if (scene.chunks() < 2)
        throw ConfigError("training needs scenes with at least two chunks");
    const int c = seq.uniform_int(0, scene.chunks() - 2);
    SampleParts p;
    p.v1_px = world.render_chunk(scene, c);
    p.v2_px = world.render_chunk(scene, c + 1);
    p.v2_poses = world.chunk_poses(scene, c + 1);
    p.v1_latents = encode_chunk(codec, p.v1_px);
    return p;
}

LatentChunk gauss_chunk(int len, int dim, rng::Sequence& seq) {
    LatentChunk x(len, dim);
    for (auto& f : x.frames)
        for (double& v : f) v = seq.gauss();
    return x;
}

synth::PerturbationSpec draw_perturbation(const TrainConfig& cfg, double max_magnitude,
                                          rng::Sequence& seq) {
    synth::PerturbationSpec spec;
    spec.kind = synth::PerturbKind::compose;
    spec.seed = seq.next_word();
    spec.magnitude = seq.uniform(0.0, max_magnitude);
    spec.direction_seed = rng::derive(cfg.seed, "perturb", "offset-axis");
    return spec;
}

memory::ContextMemory build_train_context(const SampleParts& p, const LossyCodec& codec,
                                          const TrainConfig& cfg, bool perturb_motion,
                                          rng::Sequence& seq, rng::Sequence& aug_seq) {
    std::vector<Vec> motion = memory::build_motion_memory(p.v1_latents, cfg.r);
    if (perturb_motion && cfg.r > 0) {
        LatentChunk m(cfg.r, p.v1_latents.dim);
        m.frames = motion;
        m = synth::perturb(m, draw_perturbation(cfg, cfg.perturb_max, seq));
        motion = m.frames;
    }
    std::vector<Vec> identity = memory::build_identity_memory(
        p.v1_px, cfg.K, codec, cfg.augment_identity, cfg.augment_magnitude, seq,
        cfg.augment_identity ? &aug_seq : nullptr);
    return memory::assemble_context(std::move(motion), std::move(identity), p.v1_px.len());
}


// t stratified over the batch slots (jittered); marginally uniform on [0,1]
// but batch losses become comparable across iterations.
double stratified_t(const TrainConfig& cfg, uint64_t sample_index, rng::Sequence& seq) {
    const uint64_t slot = sample_index % static_cast<uint64_t>(cfg.batch_size);
    return (static_cast<double>(slot) + seq.uniform()) / cfg.batch_size;
}

// Streams are anchored per sample index, so a sample can be rebuilt in
// isolation and toggling identity augmentation does not shift any other draw.
std::pair<rng::Sequence, rng::Sequence> sample_streams(const TrainConfig& cfg,
                                                       uint64_t sample_index) {
    return {rng::Sequence(rng::substream(rng::derive(cfg.seed, "trainer", "sample"), sample_index)),
            rng::Sequence(rng::substream(rng::derive(cfg.seed, "trainer", "identity-augment"),
                                         sample_index))};
}

}  // namespace

TrainSample make_stage1_sample(const synth::World& world, const synth::Scene& scene,
                               const LossyCodec& codec, const memory::PoseAdapter& adapter,
                               const TrainConfig& cfg, uint64_t sample_index) {
    auto [seq, aug_seq] = sample_streams(cfg, sample_index);
    SampleParts p = adjacent_chunks(world, scene, codec, seq);

    TrainSample s;
    s.stage = 1;
    s.motion_perturbed = true;
    s.restorative_target = false;
    s.t = stratified_t(cfg, sample_index, seq);

    memory::ContextMemory ctx = build_train_context(p, codec, cfg, true, seq, aug_seq);
    const LatentChunk x1 = encode_chunk(codec, p.v2_px);
    const LatentChunk x0 = gauss_chunk(x1.len(), x1.dim, seq);

    s.target_velocity = flow::fm_velocity(x0, x1);
    LatentChunk xt = flow::interpolate(x0, x1, s.t);
    s.input = memory::concat_channels(memory::inject_pose(xt, p.v2_poses, adapter),
                                      std::move(ctx), s.t);
    s.clean_x1 = x1;
    return s;
}

TrainSample make_stage2_sample(const synth::World& world, const synth::Scene& scene,
                               const LossyCodec& codec, const memory::PoseAdapter& adapter,
                               const TrainConfig& cfg, uint64_t sample_index) {
    auto [seq, aug_seq] = sample_streams(cfg, sample_index);
    SampleParts p = adjacent_chunks(world, scene, codec, seq);

    TrainSample s;
    s.stage = 2;
    s.motion_perturbed = false;  // propagated motion latent stays clean
    s.restorative_target = true;
    s.t = stratified_t(cfg, sample_index, seq);

    memory::ContextMemory ctx = build_train_context(p, codec, cfg, false, seq, aug_seq);
    const LatentChunk x1 = encode_chunk(codec, p.v2_px);
    const LatentChunk x0 = gauss_chunk(x1.len(), x1.dim, seq);

    // endpoint drift: perturb the target chunk in pixel space, re-encode
    const PixelChunk v2_tilde =
        synth::perturb(p.v2_px, draw_perturbation(cfg, cfg.perturb_max, seq));
    const LatentChunk x1_tilde = encode_chunk(codec, v2_tilde);

    s.target_velocity = flow::restorative_velocity(x0, x1, x1_tilde, s.t, cfg.beta);
    LatentChunk xt_tilde = flow::interpolate(x0, x1_tilde, s.t);
    s.input = memory::concat_channels(memory::inject_pose(xt_tilde, p.v2_poses, adapter),
                                      std::move(ctx), s.t);
    s.clean_x1 = x1;
    return s;
}

double TrainResult::stage_mean_first_decile(int stage) const {
    std::vector<double> losses;
    for (const auto& pt : curve)
        if (pt.stage == stage) losses.push_back(pt.loss);
    if (losses.empty()) return std::numeric_limits<double>::quiet_NaN();
    const size_t k = std::max<size_t>(1, losses.size() / 10);
    double s = 0;
    for (size_t i = 0; i < k; ++i) s += losses[i];
    return s / static_cast<double>(k);
}

double TrainResult::stage_mean_last_decile(int stage) const {
    std::vector<double> losses;
    for (const auto& pt : curve)
        if (pt.stage == stage) losses.push_back(pt.loss);
    if (losses.empty()) return std::numeric_limits<double>::quiet_NaN();
    const size_t k = std::max<size_t>(1, losses.size() / 10);
    double s = 0;
    for (size_t i = losses.size() - k; i < losses.size(); ++i) s += losses[i];
    return s / static_cast<double>(k);
}

TrainResult train(VectorField& field, const synth::World& world,
                  const std::vector<synth::Scene>& scenes, const LossyCodec& codec,
                  const memory::PoseAdapter& adapter, const TrainConfig& cfg) {
    if (scenes.empty()) throw ConfigError("train: empty scene set");
    if (cfg.stage1_iters < 0 || cfg.stage2_iters < 0 || cfg.batch_size < 1)
        throw ConfigError("train: bad iteration or batch settings");
    if (!(cfg.lr > 0.0)) throw ConfigError("train: lr must be positive");

    const rng::Stream scene_pick(rng::derive(cfg.seed, "trainer", "scene-pick"));
    AdamState opt(AdamConfig{.lr = cfg.lr});
    TrainResult result;

    const int total = cfg.stage1_iters + cfg.stage2_iters;
    for (int iter = 0; iter < total; ++iter) {
        const int stage = iter < cfg.stage1_iters ? 1 : 2;
        if (iter == cfg.stage1_iters) opt = AdamState(AdamConfig{.lr = cfg.lr});  // fresh optimizer per stage
        GradientRecord batch;
        batch.grad.assign(field.params().size(), 0.0);
        for (int j = 0; j < cfg.batch_size; ++j) {
            const uint64_t sample_index =
                static_cast<uint64_t>(iter) * cfg.batch_size + static_cast<uint64_t>(j);
            const auto& scene = scenes[scene_pick.word(sample_index) % scenes.size()];
            const TrainSample s =
                stage == 1 ? make_stage1_sample(world, scene, codec, adapter, cfg, sample_index)
                           : make_stage2_sample(world, scene, codec, adapter, cfg, sample_index);
            const GradientRecord g = field.loss_and_grad(s.input, s.target_velocity);
            batch.loss += g.loss;
            for (size_t i = 0; i < batch.grad.size(); ++i) batch.grad[i] += g.grad[i];
        }
        const double inv_b = 1.0 / cfg.batch_size;
        batch.loss *= inv_b;
        for (double& g : batch.grad) g *= inv_b;
        if (!std::isfinite(batch.loss))
            throw NumericError("train: non-finite loss at iteration " + std::to_string(iter));
        adam_step(field, batch, opt);
        result.curve.push_back({iter, stage, batch.loss});
    }
    return result;
}

}  // namespace driftlab
