#include "driftlab/lab.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "driftlab/io.hpp"
#include "json.hpp"

namespace driftlab::lab {

namespace fs = std::filesystem;
using nlohmann::json;

synth::World make_world(const ExperimentConfig& cfg) {
    synth::SceneParams p;
    p.pixel_dim = cfg.d;
    p.pose_dim = cfg.p;
    p.identity_dim = cfg.identity_dim;
    p.chunks = cfg.N;
    p.frames_per_chunk = cfg.L;
    return synth::World(p, cfg.seed);
}

LossyCodec make_codec(const ExperimentConfig& cfg) {
    return LossyCodec({.dim = cfg.d,
                       .gamma = cfg.gamma,
                       .noise_sigma = cfg.noise_sigma,
                       .mu = {},
                       .seed = rng::derive(cfg.seed, "codec", "instance")});
}

memory::PoseAdapter make_adapter(const ExperimentConfig& cfg) {
    return memory::PoseAdapter::seeded(cfg.p, cfg.d, rng::derive(cfg.seed, "memory", "pose-adapter"),
                                       0.5);
}

FieldShape make_field_shape(const ExperimentConfig& cfg) {
    return FieldShape{.dim = cfg.d, .hidden = cfg.hidden};
}

VectorField make_initial_field(const ExperimentConfig& cfg) {
    return VectorField::seeded(make_field_shape(cfg), rng::derive(cfg.seed, "field", "init"));
}

TrainConfig make_train_config(const ExperimentConfig& cfg) {
    TrainConfig t;
    t.stage1_iters = cfg.stage1_iters;
    t.stage2_iters = cfg.stage2_iters;
    t.batch_size = cfg.batch_size;
    t.lr = cfg.lr;
    t.beta = cfg.beta;
    t.perturb_max = cfg.perturb_max;
    t.augment_identity = cfg.augment;
    t.augment_magnitude = cfg.augment_magnitude;
    t.r = cfg.r;
    t.K = cfg.K;
    t.seed = rng::derive(cfg.seed, "trainer", "stream");
    return t;
}

RolloutConfig make_rollout_config(const ExperimentConfig& cfg) {
    RolloutConfig r;
    r.mode = parse_rollout_mode(cfg.mode);
    r.chunks = cfg.N;
    r.frames_per_chunk = cfg.L;
    r.r = cfg.r;
    r.K = cfg.K;
    r.m = cfg.m;
    return r;
}

SamplerConfig make_sampler_config(const ExperimentConfig& cfg) {
    return SamplerConfig{.steps = cfg.S, .seed = rng::derive(cfg.seed, "sampler", "noise")};
}

std::vector<synth::Scene> make_train_scenes(const ExperimentConfig& cfg,
                                            const synth::World& world) {
    const uint64_t key = rng::derive(cfg.seed, "synth", "train-scene");
    std::vector<synth::Scene> scenes;
    scenes.reserve(cfg.train_scenes);
    for (int i = 0; i < cfg.train_scenes; ++i)
        scenes.push_back(world.make_scene(rng::substream(key, i)));
    return scenes;
}

std::vector<synth::Scene> make_eval_scenes(const ExperimentConfig& cfg, const synth::World& world) {
    const uint64_t key = rng::derive(cfg.seed, "synth", "eval-scene");
    std::vector<synth::Scene> scenes;
    scenes.reserve(cfg.eval_scenes);
    for (int i = 0; i < cfg.eval_scenes; ++i)
        scenes.push_back(world.make_scene(rng::substream(key, i)));
    return scenes;
}

ChunkVelocityFn model_fn(const VectorField& field) {
    return [&field](const memory::ModelInput& input, double, int) { return field.evaluate(input); };
}

int cmd_check(const ExperimentConfig& cfg, std::ostream& out) {
    return checks::run_checks(out, cfg) ? 0 : 4;
}

namespace {

std::string ensure_dir(const std::string& out_dir) {
    fs::create_directories(out_dir);
    return out_dir;
}

std::ofstream open_csv(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path);
    out << "# config_hash=" << cfg.hash() << " seed=" << cfg.seed << '\n';
    return out;
}

}  // namespace

BenchOutputs cmd_roundtrip_bench(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const LossyCodec codec = make_codec(cfg);

    // one seeded probe frame; its distance to the codec mean scales the curve
    rng::Sequence rng(rng::derive(cfg.seed, "bench", "probe-frame"));
    Vec frame(cfg.d);
    for (double& x : frame) x = rng.gauss();
    double base = 0;
    for (int i = 0; i < cfg.d; ++i) {
        const double dmu = frame[i] - codec.mu()[i];
        base += dmu * dmu;
    }
    base = std::sqrt(base);

    const auto curve = codec.roundtrip_error_curve(frame, cfg.bench_rounds);
    BenchOutputs outputs;
    outputs.csv_path = out_dir + "/roundtrip_bench.csv";
    std::ofstream out = open_csv(outputs.csv_path, cfg);
    out << "k,error_l2,closed_form_sigma0\n";
    for (int k = 1; k <= cfg.bench_rounds; ++k)
        out << k << ',' << io::fmt_double(curve[k - 1]) << ','
            << io::fmt_double((1.0 - std::pow(cfg.gamma, k)) * base) << '\n';
    return outputs;
}

TrainOutputs cmd_train(const ExperimentConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const synth::World world = make_world(cfg);
    const LossyCodec codec = make_codec(cfg);
    const memory::PoseAdapter adapter = make_adapter(cfg);
    const std::vector<synth::Scene> scenes = make_train_scenes(cfg, world);

    VectorField field = make_initial_field(cfg);
    TrainOutputs outputs;
    outputs.result = train(field, world, scenes, codec, adapter, make_train_config(cfg));

    outputs.checkpoint_path = out_dir + "/checkpoint.txt";
    io::save_checkpoint(outputs.checkpoint_path, field,
                        {.shape = field.shape(),
                         .seed = cfg.seed,
                         .iterations = cfg.stage1_iters + cfg.stage2_iters});
    outputs.loss_csv_path = out_dir + "/loss_curve.csv";
    io::write_loss_curve(outputs.loss_csv_path, outputs.result, cfg.hash(), cfg.seed);
    return outputs;
}

RolloutOutputs cmd_rollout(const ExperimentConfig& cfg, const std::string& out_dir,
                           const std::string& checkpoint_path) {
    ensure_dir(out_dir);
    const synth::World world = make_world(cfg);
    const LossyCodec codec = make_codec(cfg);
    const memory::PoseAdapter adapter = make_adapter(cfg);
    const std::vector<synth::Scene> scenes = make_eval_scenes(cfg, world);

    const VectorField field = checkpoint_path.empty()
                                  ? make_initial_field(cfg)
                                  : io::load_checkpoint(checkpoint_path, make_field_shape(cfg));
    const ChunkVelocityFn model = model_fn(field);
    const RolloutConfig rcfg = make_rollout_config(cfg);
    const SamplerConfig scfg = make_sampler_config(cfg);

    RolloutOutputs outputs;
    outputs.csv_path = out_dir + "/rollout.csv";
    std::ofstream csv = open_csv(outputs.csv_path, cfg);
    csv << "run_id,mode,chunk_index,codec_roundtrips,background_mse,character_mse,identity_mse,"
           "psnr_analog\n";

    json summary;
    summary["config_hash"] = cfg.hash();
    summary["seed"] = cfg.seed;
    summary["mode"] = cfg.mode;
    json per_scene = json::array();

    for (size_t si = 0; si < scenes.size(); ++si) {
        SamplerConfig scene_scfg = scfg;
        scene_scfg.seed = rng::substream(scfg.seed, si);
        RolloutResult res = rollout(model, adapter, world, scenes[si], codec, rcfg, scene_scfg);
        const metrics::DriftReport rep = metrics::drift_report(res.pixels, world, scenes[si]);

        const std::string run_id = "scene" + std::to_string(si);
        for (int n = 0; n < cfg.N; ++n) {
            const auto& cm = rep.chunks[n];
            csv << run_id << ',' << cfg.mode << ',' << n << ','
                << res.trace[n].codec_roundtrips << ',' << io::fmt_double(cm.background_mse)
                << ',' << io::fmt_double(cm.character_mse) << ','
                << io::fmt_double(cm.identity_mse) << ',' << io::fmt_double(cm.psnr_analog)
                << '\n';
        }
        io::write_frames_dump(out_dir + "/frames_" + run_id + ".txt", res.pixels, cfg.hash());

        json js;
        js["run_id"] = run_id;
        js["background_slope"] = rep.background_slope;
        js["character_slope"] = rep.character_slope;
        js["identity_slope"] = rep.identity_slope;
        js["total_codec_roundtrips"] = res.total_roundtrips();
        js["identity_completion_indices"] = res.identity_completion_indices;
        per_scene.push_back(js);

        outputs.reports.push_back(rep);
        outputs.rollouts.push_back(std::move(res));
    }
    summary["scenes"] = per_scene;
    outputs.summary_path = out_dir + "/rollout_summary.json";
    std::ofstream js(outputs.summary_path);
    js << summary.dump(2) << '\n';
    return outputs;
}

AblateOutputs cmd_ablate(const ExperimentConfig& cfg, const std::string& out_dir, bool parallel) {
    ensure_dir(out_dir);
    const synth::World world = make_world(cfg);
    const LossyCodec codec = make_codec(cfg);
    const memory::PoseAdapter adapter = make_adapter(cfg);
    const std::vector<synth::Scene> train_scenes = make_train_scenes(cfg, world);
    const std::vector<synth::Scene> eval_scenes = make_eval_scenes(cfg, world);
    const TrainConfig tcfg = make_train_config(cfg);

    // the FM-only ablation drops the anti-drift stage; both fields share the
    // same stage-1 trajectory, so the comparison isolates what stage 2 adds
    TrainConfig fm_cfg = tcfg;
    fm_cfg.stage2_iters = 0;
    VectorField field_fm = make_initial_field(cfg);
    train(field_fm, world, train_scenes, codec, adapter, fm_cfg);

    VectorField field_rfm = make_initial_field(cfg);
    train(field_rfm, world, train_scenes, codec, adapter, tcfg);

    AblateOutputs outputs;
    outputs.table = metrics::ablation_suite(model_fn(field_fm), model_fn(field_rfm), adapter,
                                            world, eval_scenes, codec, make_rollout_config(cfg),
                                            make_sampler_config(cfg), parallel);

    outputs.table_path = out_dir + "/ablation.csv";
    std::ofstream table_csv = open_csv(outputs.table_path, cfg);
    table_csv << "preset,mode,rfm_trained,background_slope,character_slope,identity_slope\n";
    for (const auto& preset : outputs.table.presets)
        table_csv << preset.name << ',' << rollout_mode_name(preset.mode) << ','
                  << (preset.rfm_trained ? 1 : 0) << ','
                  << io::fmt_double(preset.mean_background_slope()) << ','
                  << io::fmt_double(preset.mean_character_slope()) << ','
                  << io::fmt_double(preset.mean_identity_slope()) << '\n';

    outputs.chunks_path = out_dir + "/ablation_chunks.csv";
    std::ofstream chunks_csv = open_csv(outputs.chunks_path, cfg);
    chunks_csv << "run_id,mode,chunk_index,background_mse,character_mse,identity_mse,psnr_analog\n";
    for (const auto& preset : outputs.table.presets)
        for (size_t si = 0; si < preset.per_scene.size(); ++si)
            for (const auto& cm : preset.per_scene[si].chunks)
                chunks_csv << preset.name << "/scene" << si << ','
                           << rollout_mode_name(preset.mode) << ',' << cm.chunk_index << ','
                           << io::fmt_double(cm.background_mse) << ','
                           << io::fmt_double(cm.character_mse) << ','
                           << io::fmt_double(cm.identity_mse) << ','
                           << io::fmt_double(cm.psnr_analog) << '\n';

    // restoration probe: endpoint error from a perturbed mid-trajectory state
    json summary;
    summary["config_hash"] = cfg.hash();
    summary["seed"] = cfg.seed;
    json probes = json::array();
    for (size_t si = 0; si < eval_scenes.size(); ++si) {
        const auto probe = metrics::restoration_probe(
            field_rfm, field_fm, world, eval_scenes[si], codec, adapter, tcfg, 0.5,
            std::max(1, cfg.S / 2), 16,
            rng::substream(rng::derive(cfg.seed, "ablate", "probe"), si));
        json jp;
        jp["scene"] = si;
        jp["rfm_endpoint_error"] = probe.error_a;
        jp["fm_endpoint_error"] = probe.error_b;
        probes.push_back(jp);
    }
    summary["restoration_probe"] = probes;
    json jt = json::array();
    for (const auto& preset : outputs.table.presets) {
        json jp;
        jp["preset"] = preset.name;
        jp["mode"] = rollout_mode_name(preset.mode);
        jp["rfm_trained"] = preset.rfm_trained;
        jp["background_slope"] = preset.mean_background_slope();
        jp["character_slope"] = preset.mean_character_slope();
        jp["identity_slope"] = preset.mean_identity_slope();
        jt.push_back(jp);
    }
    summary["presets"] = jt;
    outputs.summary_path = out_dir + "/ablation_summary.json";
    std::ofstream js(outputs.summary_path);
    js << summary.dump(2) << '\n';
    return outputs;
}

}  // namespace driftlab::lab
