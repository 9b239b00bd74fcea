#include "driftlab/synth.hpp"

#include <algorithm>
#include <cmath>

namespace driftlab::synth {

CharacterMap::CharacterMap(int pixel_dim, int identity_dim, int pose_dim, int features,
                           double freq_scale, double scale, uint64_t seed)
    : pixel_dim_(pixel_dim),
      identity_dim_(identity_dim),
      pose_dim_(pose_dim),
      n_features_(features),
      scale_(scale) {
    rng::Sequence rng(seed);
    freq_.assign(n_features_, Vec(pose_dim_));
    phase_.resize(n_features_);
    for (int j = 0; j < n_features_; ++j) {
        for (int k = 0; k < pose_dim_; ++k) freq_[j][k] = freq_scale * rng.gauss();
        phase_[j] = rng.uniform(0.0, 2.0 * M_PI);
    }
    // normalize so per-coordinate character std is roughly scale_ for unit identities
    const double norm = 1.0 / std::sqrt(static_cast<double>(identity_dim_ * n_features_));
    mix_.assign(pixel_dim_, Vec(identity_dim_ * n_features_));
    for (int i = 0; i < pixel_dim_; ++i)
        for (int c = 0; c < identity_dim_ * n_features_; ++c) mix_[i][c] = rng.gauss() * norm;
}

Vec CharacterMap::features(const Vec& pose) const {
    check_dim(pose, pose_dim_, "character pose");
    Vec f(n_features_);
    for (int j = 0; j < n_features_; ++j) f[j] = std::sin(vec_dot(freq_[j], pose) + phase_[j]);
    return f;
}

Vec CharacterMap::render(const Vec& identity, const Vec& pose) const {
    check_dim(identity, identity_dim_, "character identity");
    const Vec f = features(pose);
    Vec out(pixel_dim_, 0.0);
    for (int i = 0; i < pixel_dim_; ++i) {
        double s = 0;
        const Vec& row = mix_[i];
        for (int a = 0; a < identity_dim_; ++a)
            for (int j = 0; j < n_features_; ++j) s += row[a * n_features_ + j] * identity[a] * f[j];
        out[i] = scale_ * s;
    }
    return out;
}

std::vector<Vec> CharacterMap::identity_basis(const Vec& pose) const {
    const Vec f = features(pose);
    std::vector<Vec> g(pixel_dim_, Vec(identity_dim_, 0.0));
    for (int i = 0; i < pixel_dim_; ++i)
        for (int a = 0; a < identity_dim_; ++a) {
            double s = 0;
            for (int j = 0; j < n_features_; ++j) s += mix_[i][a * n_features_ + j] * f[j];
            g[i][a] = scale_ * s;
        }
    return g;
}

World::World(SceneParams params, uint64_t master_seed)
    : params_(params),
      cmap_(params.pixel_dim, params.identity_dim, params.pose_dim, params.char_features,
            params.char_freq, params.char_scale,
            rng::derive(master_seed, "synth", "character-map")) {
    if (params_.chunks < 1 || params_.frames_per_chunk < 1)
        throw ConfigError("scene: chunks and frames_per_chunk must be >= 1");
}

Scene World::make_scene(uint64_t scene_seed) const {
    Scene s;
    // spatially smooth static field: circular moving average of white noise,
    // renormalized; small cyclic shifts keep it highly correlated, like
    // translating a natural image
    rng::Sequence bg(rng::derive(scene_seed, "scene", "background"));
    const int d = params_.pixel_dim;
    Vec white(d);
    for (double& x : white) x = bg.gauss();
    const int half = std::max(1, d / 16);
    s.background.assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int o = -half; o <= half; ++o) s.background[i] += white[((i + o) % d + d) % d];
        s.background[i] *= params_.background_scale / std::sqrt(2.0 * half + 1.0);
    }

    rng::Sequence idr(rng::derive(scene_seed, "scene", "identity"));
    s.identity.resize(params_.identity_dim);
    for (double& x : s.identity) x = idr.gauss();

    // smooth pose track: integrated Gaussian increments, clipped
    rng::Sequence pr(rng::derive(scene_seed, "scene", "pose-track"));
    const int T = params_.total_frames();
    s.pose_track = PoseTrack(T, params_.pose_dim);
    Vec pos(params_.pose_dim), vel(params_.pose_dim, 0.0);
    for (double& x : pos) x = 0.5 * pr.gauss();
    for (int ell = 0; ell < T; ++ell) {
        for (int k = 0; k < params_.pose_dim; ++k) {
            vel[k] = 0.9 * vel[k] + params_.pose_step * pr.gauss();
            pos[k] = std::clamp(pos[k] + vel[k], -params_.pose_clip, params_.pose_clip);
            s.pose_track.frames[ell][k] = pos[k];
        }
    }
    s.frames_per_chunk = params_.frames_per_chunk;
    return s;
}

Vec World::render_frame(const Scene& scene, int ell) const {
    if (ell < 0 || ell >= scene.total_frames())
        throw DomainError("render_frame: frame index " + std::to_string(ell) + " out of range");
    Vec out = scene.background;
    const Vec ch = cmap_.render(scene.identity, scene.pose_track.frames[ell]);
    for (int i = 0; i < params_.pixel_dim; ++i) out[i] += ch[i];
    return out;
}

PixelChunk World::render_chunk(const Scene& scene, int chunk_index) const {
    const int L = scene.frames_per_chunk;
    if (chunk_index < 0 || chunk_index >= scene.chunks())
        throw DomainError("render_chunk: chunk index out of range");
    PixelChunk out(L, params_.pixel_dim);
    for (int f = 0; f < L; ++f) out.frames[f] = render_frame(scene, chunk_index * L + f);
    return out;
}

PoseTrack World::chunk_poses(const Scene& scene, int chunk_index) const {
    const int L = scene.frames_per_chunk;
    if (chunk_index < 0 || chunk_index >= scene.chunks())
        throw DomainError("chunk_poses: chunk index out of range");
    PoseTrack out(L, params_.pose_dim);
    for (int f = 0; f < L; ++f) out.frames[f] = scene.pose_track.frames[chunk_index * L + f];
    return out;
}

std::vector<std::pair<PixelChunk, PoseTrack>> World::split_chunks(const Scene& scene, int L) const {
    const int T = scene.total_frames();
    if (L < 1 || T % L != 0)
        throw ConfigError("split_chunks: total frames " + std::to_string(T) +
                          " not divisible by chunk length " + std::to_string(L));
    std::vector<std::pair<PixelChunk, PoseTrack>> out;
    const int n = T / L;
    out.reserve(n);
    for (int c = 0; c < n; ++c) {
        PixelChunk px(L, params_.pixel_dim);
        PoseTrack ps(L, params_.pose_dim);
        for (int f = 0; f < L; ++f) {
            px.frames[f] = render_frame(scene, c * L + f);
            ps.frames[f] = scene.pose_track.frames[c * L + f];
        }
        out.emplace_back(std::move(px), std::move(ps));
    }
    return out;
}

PerturbKind parse_perturb_kind(const std::string& name) {
    if (name == "gain") return PerturbKind::gain;
    if (name == "offset") return PerturbKind::offset;
    if (name == "smooth") return PerturbKind::smooth;
    if (name == "compose") return PerturbKind::compose;
    throw ConfigError("unknown perturbation kind: " + name);
}

namespace {

PerturbKind resolve_kind(const PerturbationSpec& spec) {
    if (spec.kind != PerturbKind::compose) return spec.kind;
    rng::Stream s(rng::derive(spec.seed, "perturb", "family"));
    switch (s.word(0) % 3) {
        case 0: return PerturbKind::gain;
        case 1: return PerturbKind::offset;
        default: return PerturbKind::smooth;
    }
}

double chunk_mean(const PixelChunk& c) {
    double s = 0;
    for (const auto& f : c.frames)
        for (double x : f) s += x;
    return s / (static_cast<double>(c.len()) * c.dim);
}

}  // namespace

Vec offset_direction(const PerturbationSpec& spec, int dim) {
    rng::Sequence rng(rng::derive(spec.direction_seed, "perturb", "offset-direction"));
    Vec u(dim);
    double norm = 0;
    do {
        for (double& x : u) x = rng.gauss();
        norm = l2_norm(u);
    } while (norm < 1e-12);
    for (double& x : u) x /= norm;
    return u;
}

PixelChunk perturb(const PixelChunk& chunk, const PerturbationSpec& spec) {
    if (!all_finite(chunk)) throw NumericError("perturb: non-finite input chunk");
    if (spec.magnitude == 0.0) return chunk;  // T_0 is the identity map

    const double m = spec.magnitude;
    PixelChunk out = chunk;
    switch (resolve_kind(spec)) {
        case PerturbKind::gain: {
            const double mean = chunk_mean(chunk);
            for (auto& f : out.frames)
                for (double& x : f) x = mean + (1.0 + m) * (x - mean);
            break;
        }
        case PerturbKind::offset: {
            const Vec u = offset_direction(spec, chunk.dim);
            for (auto& f : out.frames)
                for (int i = 0; i < chunk.dim; ++i) f[i] += m * u[i];
            break;
        }
        case PerturbKind::smooth: {
            const int n = chunk.len();
            for (int f = 0; f < n; ++f) {
                const Vec& prev = chunk.frames[std::max(0, f - 1)];
                const Vec& next = chunk.frames[std::min(n - 1, f + 1)];
                for (int i = 0; i < chunk.dim; ++i) {
                    const double avg = (prev[i] + chunk.frames[f][i] + next[i]) / 3.0;
                    out.frames[f][i] = (1.0 - m) * chunk.frames[f][i] + m * avg;
                }
            }
            break;
        }
        case PerturbKind::compose:
            break;  // unreachable; resolved above
    }
    return out;
}

}  // namespace driftlab::synth
