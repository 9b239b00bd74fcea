#include "driftlab/metrics.hpp"

#include <cmath>
#include <limits>
#include <thread>

namespace driftlab::metrics {

double ols_slope(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    if (n < 2) return 0.0;
    const double xbar = (n - 1) / 2.0;
    double ybar = 0;
    for (double v : y) ybar += v;
    ybar /= n;
    double num = 0, den = 0;
    for (int i = 0; i < n; ++i) {
        num += (i - xbar) * (y[i] - ybar);
        den += (i - xbar) * (i - xbar);
    }
    return num / den;
}

namespace {

// Gaussian elimination with partial pivoting; small symmetric systems only.
Vec solve_linear(std::vector<Vec> m, Vec v) {
    const int n = static_cast<int>(v.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        std::swap(m[col], m[piv]);
        std::swap(v[col], v[piv]);
        if (std::abs(m[col][col]) < 1e-14)
            throw NumericError("identity recovery: singular normal equations");
        for (int row = col + 1; row < n; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < n; ++k) m[row][k] -= f * m[col][k];
            v[row] -= f * v[col];
        }
    }
    Vec x(n);
    for (int row = n - 1; row >= 0; --row) {
        double s = v[row];
        for (int k = row + 1; k < n; ++k) s -= m[row][k] * x[k];
        x[row] = s / m[row][row];
    }
    return x;
}

double pearson(const Vec& a, const Vec& b) {
    const int n = static_cast<int>(a.size());
    double ma = 0, mb = 0;
    for (int i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (int i = 0; i < n; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va <= 0 || vb <= 0) return 0.0;
    return cov / std::sqrt(va * vb);
}

}  // namespace

Vec recover_identity(const synth::World& world, const synth::Scene& scene, int chunk_index,
                     const std::vector<Vec>& residual_frames) {
    const int id_dim = world.params().identity_dim;
    const int px_dim = world.params().pixel_dim;
    const int L = scene.frames_per_chunk;
    if (static_cast<int>(residual_frames.size()) != L)
        throw DimensionError("recover_identity: residual count does not match chunk length");

    std::vector<Vec> normal(id_dim, Vec(id_dim, 0.0));
    Vec rhs(id_dim, 0.0);
    for (int f = 0; f < L; ++f) {
        const Vec& pose = scene.pose_track.frames[chunk_index * L + f];
        const std::vector<Vec> g = world.character_map().identity_basis(pose);
        for (int i = 0; i < px_dim; ++i) {
            for (int a = 0; a < id_dim; ++a) {
                for (int b = 0; b < id_dim; ++b) normal[a][b] += g[i][a] * g[i][b];
                rhs[a] += g[i][a] * residual_frames[f][i];
            }
        }
    }
    return solve_linear(std::move(normal), std::move(rhs));
}

DriftReport drift_report(const std::vector<PixelChunk>& generated, const synth::World& world,
                         const synth::Scene& scene) {
    const int N = scene.chunks();
    const int L = scene.frames_per_chunk;
    const int d = world.params().pixel_dim;
    if (static_cast<int>(generated.size()) != N)
        throw DimensionError("drift_report: " + std::to_string(generated.size()) +
                             " chunks generated, scene has " + std::to_string(N));

    DriftReport rep;
    std::vector<double> bg_series, ch_series, id_series;
    for (int n = 0; n < N; ++n) {
        const PixelChunk& g = generated[n];
        if (g.len() != L || g.dim != d)
            throw DimensionError("drift_report: chunk " + std::to_string(n) + " has wrong shape");

        std::vector<Vec> char_true(L);
        for (int f = 0; f < L; ++f)
            char_true[f] =
                world.character_map().render(scene.identity, scene.pose_track.frames[n * L + f]);

        // static-component estimate: temporal mean of (generated - true character)
        Vec bg_hat(d, 0.0);
        for (int f = 0; f < L; ++f)
            for (int i = 0; i < d; ++i) bg_hat[i] += (g.frames[f][i] - char_true[f][i]) / L;

        ChunkMetrics cm;
        cm.chunk_index = n;
        for (int i = 0; i < d; ++i) {
            const double e = bg_hat[i] - scene.background[i];
            cm.background_mse += e * e / d;
        }
        std::vector<Vec> resid(L, Vec(d));
        double frame_mse = 0;
        for (int f = 0; f < L; ++f) {
            for (int i = 0; i < d; ++i) {
                resid[f][i] = g.frames[f][i] - bg_hat[i];
                const double ce = resid[f][i] - char_true[f][i];
                cm.character_mse += ce * ce / (static_cast<double>(L) * d);
                const double fe = g.frames[f][i] - (scene.background[i] + char_true[f][i]);
                frame_mse += fe * fe / (static_cast<double>(L) * d);
            }
        }
        const Vec id_hat = recover_identity(world, scene, n, resid);
        for (int a = 0; a < world.params().identity_dim; ++a) {
            const double e = id_hat[a] - scene.identity[a];
            cm.identity_mse += e * e / world.params().identity_dim;
        }
        cm.psnr_analog = frame_mse > 0 ? -10.0 * std::log10(frame_mse)
                                       : std::numeric_limits<double>::infinity();
        bg_series.push_back(cm.background_mse);
        ch_series.push_back(cm.character_mse);
        id_series.push_back(cm.identity_mse);
        rep.chunks.push_back(cm);
    }
    rep.background_slope = ols_slope(bg_series);
    rep.character_slope = ols_slope(ch_series);
    rep.identity_slope = ols_slope(id_series);
    return rep;
}

double context_bias_statistic(const std::vector<RolloutResult>& rollouts, int r, int K) {
    double total = 0;
    int count = 0;
    for (const auto& res : rollouts) {
        if (res.identity_memory.empty()) continue;
        for (size_t n = 1; n < res.latents.size(); ++n) {
            for (int j = 0; j < K; ++j) {
                total += std::abs(pearson(res.identity_memory[j], res.latents[n].frames[r + j]));
                ++count;
            }
        }
    }
    if (count == 0) throw DomainError("context_bias_statistic: no identity-memory chunks");
    return total / count;
}

double PresetResult::mean_background_slope() const {
    double s = 0;
    for (const auto& r : per_scene) s += r.background_slope;
    return per_scene.empty() ? 0 : s / per_scene.size();
}

double PresetResult::mean_character_slope() const {
    double s = 0;
    for (const auto& r : per_scene) s += r.character_slope;
    return per_scene.empty() ? 0 : s / per_scene.size();
}

double PresetResult::mean_identity_slope() const {
    double s = 0;
    for (const auto& r : per_scene) s += r.identity_slope;
    return per_scene.empty() ? 0 : s / per_scene.size();
}

AblationTable ablation_suite(const ChunkVelocityFn& fm_model, const ChunkVelocityFn& rfm_model,
                             const memory::PoseAdapter& adapter, const synth::World& world,
                             const std::vector<synth::Scene>& scenes, const LossyCodec& codec,
                             const RolloutConfig& rcfg_base, const SamplerConfig& scfg,
                             bool parallel) {
    AblationTable table;
    table.presets = {
        {"baseline", RolloutMode::image_carryover, false, {}},
        {"wo_rfm", RolloutMode::latent_plp, false, {}},
        {"wo_plp", RolloutMode::image_carryover, true, {}},
        {"full", RolloutMode::latent_plp_rfm, true, {}},
    };

    auto run_preset = [&](PresetResult& preset) {
        const ChunkVelocityFn& model = preset.rfm_trained ? rfm_model : fm_model;
        RolloutConfig rcfg = rcfg_base;
        rcfg.mode = preset.mode;
        for (size_t si = 0; si < scenes.size(); ++si) {
            // average the per-chunk metrics over a few sampler sub-seeds so a
            // scene's report reflects the strategy, not one noise draw
            DriftReport mean_rep;
            for (int sub = 0; sub < kRolloutsPerScene; ++sub) {
                SamplerConfig scene_scfg = scfg;
                scene_scfg.seed = rng::substream(rng::substream(scfg.seed, si), sub);
                const RolloutResult r =
                    rollout(model, adapter, world, scenes[si], codec, rcfg, scene_scfg);
                const DriftReport rep = drift_report(r.pixels, world, scenes[si]);
                if (sub == 0) {
                    mean_rep = rep;
                    for (auto& cm : mean_rep.chunks) {
                        cm.background_mse = 0;
                        cm.character_mse = 0;
                        cm.identity_mse = 0;
                        cm.psnr_analog = 0;
                    }
                }
                for (size_t c = 0; c < rep.chunks.size(); ++c) {
                    mean_rep.chunks[c].background_mse += rep.chunks[c].background_mse / kRolloutsPerScene;
                    mean_rep.chunks[c].character_mse += rep.chunks[c].character_mse / kRolloutsPerScene;
                    mean_rep.chunks[c].identity_mse += rep.chunks[c].identity_mse / kRolloutsPerScene;
                    mean_rep.chunks[c].psnr_analog += rep.chunks[c].psnr_analog / kRolloutsPerScene;
                }
            }
            std::vector<double> bg, ch, id;
            for (const auto& cm : mean_rep.chunks) {
                bg.push_back(cm.background_mse);
                ch.push_back(cm.character_mse);
                id.push_back(cm.identity_mse);
            }
            mean_rep.background_slope = ols_slope(bg);
            mean_rep.character_slope = ols_slope(ch);
            mean_rep.identity_slope = ols_slope(id);
            preset.per_scene.push_back(mean_rep);
        }
    };

    if (parallel) {
        std::vector<std::thread> workers;
        for (auto& preset : table.presets)
            workers.emplace_back([&run_preset, &preset] { run_preset(preset); });
        for (auto& w : workers) w.join();
    } else {
        for (auto& preset : table.presets) run_preset(preset);
    }
    return table;
}

RestorationProbe restoration_probe(const VectorField& field_a, const VectorField& field_b,
                                   const synth::World& world, const synth::Scene& scene,
                                   const LossyCodec& codec, const memory::PoseAdapter& adapter,
                                   const TrainConfig& tcfg, double t_start, int steps, int draws,
                                   uint64_t probe_seed) {
    rng::Sequence seq(rng::derive(probe_seed, "probe", "restoration"));

    const PixelChunk v1 = world.render_chunk(scene, 0);
    const PixelChunk v2 = world.render_chunk(scene, 1);
    const PoseTrack poses = world.chunk_poses(scene, 1);
    const LatentChunk v1_latents = encode_chunk(codec, v1);

    std::vector<Vec> motion = memory::build_motion_memory(v1_latents, tcfg.r);
    std::vector<Vec> identity =
        memory::build_identity_memory(v1, tcfg.K, codec, false, 0.0, seq, nullptr);
    memory::ContextMemory ctx =
        memory::assemble_context(std::move(motion), std::move(identity), v1.len());

    const LatentChunk x1 = encode_chunk(codec, v2);

    auto wrap = [](const VectorField& f) {
        return [&f](const memory::ModelInput& in, double) { return f.evaluate(in); };
    };
    RestorationProbe probe;
    for (int rep = 0; rep < draws; ++rep) {
        LatentChunk x0(x1.len(), x1.dim);
        for (auto& f : x0.frames)
            for (double& v : f) v = seq.gauss();

        synth::PerturbationSpec spec;
        spec.kind = synth::PerturbKind::compose;
        spec.seed = seq.next_word();
        spec.magnitude = tcfg.perturb_max;
        spec.direction_seed = rng::derive(tcfg.seed, "perturb", "offset-axis");
        const LatentChunk x1_tilde = encode_chunk(codec, synth::perturb(v2, spec));
        const LatentChunk xt_tilde = flow::interpolate(x0, x1_tilde, t_start);
        const LatentChunk xt_clean = flow::interpolate(x0, x1, t_start);

        // each field's clean-start landing is the paired control: subtracting
        // it isolates the endpoint error caused by the perturbed start
        for (int which = 0; which < 2; ++which) {
            const VectorField& f = which == 0 ? field_a : field_b;
            const LatentChunk end_pert =
                integrate_from(wrap(f), adapter, ctx, poses, xt_tilde, t_start, steps);
            const LatentChunk end_clean =
                integrate_from(wrap(f), adapter, ctx, poses, xt_clean, t_start, steps);
            const double err = l2_norm(sub(end_pert, x1)) - l2_norm(sub(end_clean, x1));
            (which == 0 ? probe.error_a : probe.error_b) += err / draws;
        }
    }
    return probe;
}

}  // namespace driftlab::metrics
