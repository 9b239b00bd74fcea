#include <cmath>

#include "doctest.h"
#include "driftlab/rng.hpp"
#include "driftlab/synth.hpp"

using namespace driftlab;

namespace {

synth::World make_world() {
    synth::SceneParams p;
    p.chunks = 3;
    p.frames_per_chunk = 4;
    return synth::World(p, 17);
}

}  // namespace

TEST_CASE("render is background plus a character term linear in identity") {
    const synth::World world = make_world();
    synth::Scene scene = world.make_scene(100);

    // zero identity: the background alone
    synth::Scene blank = scene;
    blank.identity.assign(blank.identity.size(), 0.0);
    for (int ell : {0, 5, 11}) {
        const Vec f = world.render_frame(blank, ell);
        for (size_t i = 0; i < f.size(); ++i) CHECK(f[i] == blank.background[i]);
    }

    // determinism
    CHECK(world.render_frame(scene, 3) == world.render_frame(scene, 3));

    // frames with equal poses are identical
    synth::Scene pinned = scene;
    pinned.pose_track.frames[7] = pinned.pose_track.frames[2];
    CHECK(world.render_frame(pinned, 7) == world.render_frame(pinned, 2));

    CHECK_THROWS_AS(world.render_frame(scene, -1), DomainError);
    CHECK_THROWS_AS(world.render_frame(scene, scene.total_frames()), DomainError);
}

TEST_CASE("identity basis reproduces the render map") {
    const synth::World world = make_world();
    const synth::Scene scene = world.make_scene(101);
    const Vec& pose = scene.pose_track.frames[5];
    const auto g = world.character_map().identity_basis(pose);
    const Vec direct = world.character_map().render(scene.identity, pose);
    for (size_t i = 0; i < direct.size(); ++i) {
        double s = 0;
        for (size_t a = 0; a < scene.identity.size(); ++a) s += g[i][a] * scene.identity[a];
        CHECK(s == doctest::Approx(direct[i]).epsilon(1e-12));
    }
}

TEST_CASE("motion heterogeneity: static background, moving character") {
    const synth::World world = make_world();
    const synth::Scene scene = world.make_scene(102);
    // background contribution has zero temporal variance by construction;
    // the character contribution must actually move
    double char_var = 0;
    Vec mean(world.params().pixel_dim, 0.0);
    std::vector<Vec> chars;
    for (int ell = 0; ell < scene.total_frames(); ++ell) {
        Vec c = world.character_map().render(scene.identity, scene.pose_track.frames[ell]);
        for (size_t i = 0; i < mean.size(); ++i) mean[i] += c[i] / scene.total_frames();
        chars.push_back(std::move(c));
    }
    for (const auto& c : chars)
        for (size_t i = 0; i < mean.size(); ++i) char_var += (c[i] - mean[i]) * (c[i] - mean[i]);
    CHECK(char_var > 1e-4);

    // scenes differing only in identity share the background reconstruction
    synth::Scene other = scene;
    other.identity[0] += 1.0;
    for (int ell : {0, 7}) {
        const Vec fa = world.render_frame(scene, ell);
        const Vec fb = world.render_frame(other, ell);
        const Vec ca = world.character_map().render(scene.identity, scene.pose_track.frames[ell]);
        const Vec cb = world.character_map().render(other.identity, other.pose_track.frames[ell]);
        for (size_t i = 0; i < fa.size(); ++i)
            CHECK(fa[i] - ca[i] == doctest::Approx(fb[i] - cb[i]).epsilon(1e-12));
    }
}

TEST_CASE("split_chunks partitions the scene in order") {
    const synth::World world = make_world();
    const synth::Scene scene = world.make_scene(103);  // T = 12
    const auto chunks = world.split_chunks(scene, 4);
    CHECK(chunks.size() == 3);
    for (const auto& [px, poses] : chunks) {
        CHECK(px.len() == 4);
        CHECK(poses.len() == 4);
    }
    // concatenation reproduces the original sequence exactly
    for (int n = 0; n < 3; ++n)
        for (int f = 0; f < 4; ++f) {
            CHECK(chunks[n].first.frames[f] == world.render_frame(scene, n * 4 + f));
            CHECK(chunks[n].second.frames[f] == scene.pose_track.frames[n * 4 + f]);
        }
    CHECK_THROWS_AS(world.split_chunks(scene, 5), ConfigError);
}

TEST_CASE("perturbation operators: identity at zero magnitude") {
    const synth::World world = make_world();
    const PixelChunk chunk = world.render_chunk(world.make_scene(104), 0);
    for (auto kind : {synth::PerturbKind::gain, synth::PerturbKind::offset,
                      synth::PerturbKind::smooth, synth::PerturbKind::compose}) {
        const PixelChunk out = synth::perturb(chunk, {kind, 0.0, 9, 9});
        CHECK(max_abs_diff(out, chunk) == 0);
    }
}

TEST_CASE("offset adds magnitude times the fixed unit direction") {
    const int d = 8;
    PixelChunk zero(3, d);
    synth::PerturbationSpec spec{synth::PerturbKind::offset, 0.1, 5, 42};
    const Vec u = synth::offset_direction(spec, d);
    CHECK(l2_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    const PixelChunk out = synth::perturb(zero, spec);
    for (int f = 0; f < 3; ++f)
        for (int i = 0; i < d; ++i) CHECK(out.frames[f][i] == doctest::Approx(0.1 * u[i]));
    // the direction depends on direction_seed only
    synth::PerturbationSpec other = spec;
    other.seed = 999;
    CHECK(synth::offset_direction(other, d) == u);
}

TEST_CASE("gain leaves constant chunks unchanged and scales deviations") {
    PixelChunk constant(2, 4);
    for (auto& f : constant.frames) f.assign(4, 1.7);
    const PixelChunk out =
        synth::perturb(constant, {synth::PerturbKind::gain, 0.3, 1, 1});
    CHECK(max_abs_diff(out, constant) < 1e-12);

    PixelChunk varied(1, 2);
    varied.frames[0] = {0.0, 2.0};  // mean 1
    const PixelChunk scaled = synth::perturb(varied, {synth::PerturbKind::gain, 0.5, 1, 1});
    CHECK(scaled.frames[0][0] == doctest::Approx(-0.5));
    CHECK(scaled.frames[0][1] == doctest::Approx(2.5));
}

TEST_CASE("smooth blends toward the temporal moving average") {
    PixelChunk chunk(3, 1);
    chunk.frames[0] = {0.0};
    chunk.frames[1] = {3.0};
    chunk.frames[2] = {0.0};
    const PixelChunk out = synth::perturb(chunk, {synth::PerturbKind::smooth, 1.0, 1, 1});
    CHECK(out.frames[0][0] == doctest::Approx(1.0));   // (0+0+3)/3
    CHECK(out.frames[1][0] == doctest::Approx(1.0));   // (0+3+0)/3
    CHECK(out.frames[2][0] == doctest::Approx(1.0));
    // shape preserved, finite in -> finite out
    CHECK(out.len() == chunk.len());
    CHECK(out.dim == chunk.dim);
    CHECK(all_finite(out));
}

TEST_CASE("compose resolves to one family deterministically") {
    PixelChunk chunk(2, 4);
    rng::Sequence rng(12);
    for (auto& f : chunk.frames)
        for (double& v : f) v = rng.gauss();
    const synth::PerturbationSpec spec{synth::PerturbKind::compose, 0.2, 33, 33};
    CHECK(max_abs_diff(synth::perturb(chunk, spec), synth::perturb(chunk, spec)) == 0);
}

TEST_CASE("perturb kind parsing") {
    CHECK(synth::parse_perturb_kind("gain") == synth::PerturbKind::gain);
    CHECK(synth::parse_perturb_kind("offset") == synth::PerturbKind::offset);
    CHECK(synth::parse_perturb_kind("smooth") == synth::PerturbKind::smooth);
    CHECK(synth::parse_perturb_kind("compose") == synth::PerturbKind::compose);
    CHECK_THROWS_AS(synth::parse_perturb_kind("sharpen"), ConfigError);
}

TEST_CASE("pose tracks are clipped and scenes regenerate from their seed") {
    const synth::World world = make_world();
    const synth::Scene a = world.make_scene(200);
    const synth::Scene b = world.make_scene(200);
    CHECK(a.background == b.background);
    CHECK(a.identity == b.identity);
    CHECK(max_abs_diff(a.pose_track, b.pose_track) == 0);
    for (const auto& pose : a.pose_track.frames)
        for (double v : pose) CHECK(std::abs(v) <= world.params().pose_clip);
}
