#include "driftlab/checks.hpp"

#include <cmath>
#include <sstream>

#include "driftlab/codec.hpp"
#include "driftlab/field.hpp"
#include "driftlab/flow.hpp"
#include "driftlab/io.hpp"
#include "driftlab/memory.hpp"
#include "driftlab/metrics.hpp"
#include "driftlab/rng.hpp"
#include "driftlab/sampler.hpp"
#include "driftlab/synth.hpp"

namespace driftlab::checks {

namespace {

using LambdaFn = std::function<double(double, double)>;

LatentChunk random_chunk(rng::Sequence& rng, int len, int dim, double scale = 1.0) {
    LatentChunk c(len, dim);
    for (auto& f : c.frames)
        for (double& v : f) v = scale * rng.gauss();
    return c;
}

CheckResult check_interpolant_endpoints(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 3, 8);
        const LatentChunk x1 = random_chunk(rng, 3, 8);
        worst = std::max(worst, max_abs_diff(flow::interpolate(x0, x1, 0.0), x0));
        worst = std::max(worst, max_abs_diff(flow::interpolate(x0, x1, 1.0), x1));
    }
    return {"flow-interpolant-endpoints", worst == 0.0,
            "max endpoint deviation " + io::fmt_double(worst)};
}

CheckResult check_schedule_boundaries(const LambdaFn& lam) {
    double worst = 0;
    for (double beta : {4.0, 16.0, 64.0}) {
        worst = std::max(worst, std::abs(lam(0.0, beta)));
        worst = std::max(worst, std::abs(lam(1.0, beta)));
        worst = std::max(worst, std::abs(lam(0.5, beta) - 1.0));
    }
    return {"schedule-boundaries", worst <= 1e-12,
            "max boundary deviation " + io::fmt_double(worst)};
}

CheckResult check_schedule_symmetry(const LambdaFn& lam) {
    double worst = 0;
    for (double beta : {4.0, 16.0, 64.0})
        for (int i = 0; i <= 1000; ++i) {
            const double t = i / 1000.0;
            worst = std::max(worst, std::abs(lam(t, beta) - lam(1.0 - t, beta)));
        }
    return {"schedule-symmetry", worst <= 1e-12, "max asymmetry " + io::fmt_double(worst)};
}

CheckResult check_schedule_monotone(const LambdaFn& lam) {
    double worst = 0;
    for (double beta : {4.0, 16.0, 64.0}) {
        double prev = lam(0.0, beta);
        for (int i = 1; i <= 500; ++i) {
            const double cur = lam(i / 1000.0, beta);
            worst = std::min(worst, cur - prev);  // most negative increment
            prev = cur;
        }
    }
    return {"schedule-monotone", worst >= -1e-12,
            "most negative increment on [0,1/2] " + io::fmt_double(worst)};
}

CheckResult check_schedule_range(const LambdaFn& lam) {
    double lo = 0, hi = 0;
    for (double beta : {4.0, 16.0, 64.0})
        for (int i = 0; i <= 1000; ++i) {
            const double v = lam(i / 1000.0, beta);
            lo = std::min(lo, v);
            hi = std::max(hi, v - 1.0);
        }
    return {"schedule-range", lo >= -1e-12 && hi <= 1e-12,
            "range excess low " + io::fmt_double(lo) + ", high " + io::fmt_double(hi)};
}

CheckResult check_rfm_subsumes_fm(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 200; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 8);
        const LatentChunk x1 = random_chunk(rng, 2, 8);
        const double t = rng.uniform();
        const double beta = rng.uniform(1.0, 64.0);
        worst = std::max(worst, max_abs_diff(flow::restorative_velocity(x0, x1, x1, t, beta),
                                             flow::fm_velocity(x0, x1)));
    }
    return {"flow-rfm-subsumes-fm", worst <= 1e-12, "max deviation " + io::fmt_double(worst)};
}

CheckResult check_additive_decomposition(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 1, 8);
        const LatentChunk x1 = random_chunk(rng, 1, 8);
        const LatentChunk x1t = random_chunk(rng, 1, 8);
        const double t = rng.uniform(0.0, 1.0 - flow::kSingularityEps);
        worst = std::max(worst, flow::decomposition_residual(x0, x1, x1t, t));
    }
    return {"flow-additive-decomposition", worst <= 1e-10,
            "max residual over 1e4 draws " + io::fmt_double(worst)};
}

CheckResult check_one_step_exactness(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 8);
        const LatentChunk x1 = random_chunk(rng, 2, 8);
        const LatentChunk x1t = random_chunk(rng, 2, 8);
        const double t = rng.uniform(0.0, 1.0 - flow::kSingularityEps);
        const LatentChunk xt_tilde = flow::interpolate(x0, x1t, t);
        LatentChunk landed = xt_tilde;
        axpy(landed, 1.0 - t, flow::exact_restorative_velocity(x1, xt_tilde, t));
        worst = std::max(worst, max_abs_diff(landed, x1));
    }
    return {"flow-one-step-exactness", worst <= 1e-12, "max landing error " + io::fmt_double(worst)};
}

CheckResult check_restoration_direction(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 8);
        const LatentChunk x1 = random_chunk(rng, 2, 8);
        const LatentChunk x1t = random_chunk(rng, 2, 8);
        const double t = rng.uniform();
        const double beta = rng.uniform(1.0, 64.0);
        const LatentChunk corr =
            sub(flow::restorative_velocity(x0, x1, x1t, t, beta), flow::fm_velocity(x0, x1));
        const LatentChunk gap = sub(flow::interpolate(x0, x1, t), flow::interpolate(x0, x1t, t));
        worst = std::min(worst, dot(corr, gap));
    }
    return {"flow-restoration-direction", worst >= -1e-12,
            "most negative alignment " + io::fmt_double(worst)};
}

CheckResult check_codec_lossless(const ExperimentConfig& cfg, rng::Sequence& rng) {
    LossyCodec codec({.dim = cfg.d, .gamma = 1.0, .noise_sigma = 0.0, .mu = {}, .seed = cfg.seed});
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        Vec x(cfg.d);
        for (double& v : x) v = rng.gauss();
        const Vec back = codec.decode(codec.encode(x));
        for (int i = 0; i < cfg.d; ++i) worst = std::max(worst, std::abs(back[i] - x[i]));
    }
    return {"codec-lossless-roundtrip", worst <= 1e-10, "max deviation " + io::fmt_double(worst)};
}

CheckResult check_codec_closed_form(const ExperimentConfig& cfg, rng::Sequence& rng) {
    LossyCodec codec({.dim = cfg.d, .gamma = 0.9, .noise_sigma = 0.0, .mu = {}, .seed = cfg.seed});
    Vec x(cfg.d);
    for (double& v : x) v = rng.gauss();
    const double base = l2_norm(x);  // mu = 0
    const auto curve = codec.roundtrip_error_curve(x, 12);
    double worst = 0;
    for (int k = 1; k <= 12; ++k)
        worst = std::max(worst, std::abs(curve[k - 1] - (1.0 - std::pow(0.9, k)) * base));
    return {"codec-closed-form-curve", worst <= 1e-9, "max curve deviation " + io::fmt_double(worst)};
}

CheckResult check_codec_monotone(const ExperimentConfig& cfg, rng::Sequence& rng) {
    LossyCodec codec({.dim = cfg.d, .gamma = 0.97, .noise_sigma = 0.0, .mu = {}, .seed = cfg.seed});
    Vec x(cfg.d);
    for (double& v : x) v = rng.gauss();
    const auto curve = codec.roundtrip_error_curve(x, 20);
    bool strict = true;
    for (size_t k = 1; k < curve.size(); ++k) strict = strict && curve[k] > curve[k - 1];
    return {"codec-monotone-drift", strict, strict ? "curve strictly increasing over 20 round-trips"
                                                   : "curve not strictly increasing"};
}

CheckResult check_codec_determinism(const ExperimentConfig& cfg, rng::Sequence& rng) {
    LossyCodec a({.dim = cfg.d, .gamma = cfg.gamma, .noise_sigma = cfg.noise_sigma, .mu = {},
                  .seed = cfg.seed});
    LossyCodec b({.dim = cfg.d, .gamma = cfg.gamma, .noise_sigma = cfg.noise_sigma, .mu = {},
                  .seed = cfg.seed});
    Vec x(cfg.d);
    for (double& v : x) v = rng.gauss();
    const Vec ya = a.decode(a.encode(x), 7);
    const Vec yb = b.decode(b.encode(x), 7);
    bool same = ya == yb;  // bit-identical
    return {"codec-determinism", same,
            same ? "independent instances agree bit-for-bit" : "outputs differ across instances"};
}

CheckResult check_gradient(rng::Sequence& rng) {
    const FieldShape shape{.dim = 8, .hidden = 16};
    VectorField field = VectorField::seeded(shape, rng.next_word());

    memory::ContextMemory ctx = memory::assemble_context(
        {random_chunk(rng, 1, 8).frames[0]}, random_chunk(rng, 3, 8).frames, 6);
    memory::ModelInput input =
        memory::concat_channels(random_chunk(rng, 6, 8), std::move(ctx), 0.37);
    const LatentChunk target = random_chunk(rng, 6, 8);

    const GradientRecord rec = field.loss_and_grad(input, target);
    const double h = 1e-5;
    double worst = 0;
    for (int probe = 0; probe < 64; ++probe) {
        const size_t i = rng.next_word() % field.params().size();
        const double keep = field.params()[i];
        field.params()[i] = keep + h;
        const double up = field.loss_and_grad(input, target).loss;
        field.params()[i] = keep - h;
        const double dn = field.loss_and_grad(input, target).loss;
        field.params()[i] = keep;
        const double fd = (up - dn) / (2 * h);
        const double rel = std::abs(fd - rec.grad[i]) / (std::abs(fd) + std::abs(rec.grad[i]) + 1e-10);
        worst = std::max(worst, rel);
    }
    return {"field-gradient-check", worst < 1e-4,
            "max relative error vs central differences " + io::fmt_double(worst)};
}

CheckResult check_memory_zero_codec_calls(const ExperimentConfig& cfg, rng::Sequence& rng) {
    LossyCodec codec({.dim = cfg.d, .gamma = cfg.gamma, .noise_sigma = cfg.noise_sigma, .mu = {},
                      .seed = cfg.seed});
    const LatentChunk prev = random_chunk(rng, cfg.T_z, cfg.d);
    const uint64_t enc = codec.encode_calls(), dec = codec.decode_calls();
    const auto motion = memory::build_motion_memory(prev, cfg.r);
    const bool clean = codec.encode_calls() == enc && codec.decode_calls() == dec &&
                       static_cast<int>(motion.size()) == cfg.r;
    return {"memory-zero-codec-calls", clean,
            clean ? "motion memory built with zero codec calls" : "codec call counter moved"};
}

CheckResult check_sampler_oracle(const ExperimentConfig& cfg, rng::Sequence& rng) {
    const int d = 8, t_z = 4;
    const LatentChunk x1 = random_chunk(rng, t_z, d);
    memory::ContextMemory ctx = memory::assemble_context({}, random_chunk(rng, 1, d).frames, t_z);
    const memory::PoseAdapter adapter = memory::PoseAdapter::zero(cfg.p, d);
    const PoseTrack poses(t_z, cfg.p);

    VelocityFn oracle = [&x1](const memory::ModelInput& in, double t) {
        return flow::exact_restorative_velocity(x1, in.target, t);
    };
    const SamplerConfig scfg{.steps = cfg.S, .seed = rng.next_word()};
    const LatentChunk out = sample_chunk(oracle, adapter, ctx, poses, scfg);
    const double err = max_abs_diff(out, x1);
    return {"sampler-oracle-exactness", err <= 1e-10, "endpoint error " + io::fmt_double(err)};
}

CheckResult check_ols_slope(rng::Sequence& rng) {
    double worst = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const double a = rng.uniform(-5.0, 5.0), b = rng.uniform(-5.0, 5.0);
        std::vector<double> y;
        for (int i = 0; i < 12; ++i) y.push_back(a * i + b);
        worst = std::max(worst, std::abs(metrics::ols_slope(y) - a));
    }
    return {"metrics-ols-slope", worst <= 1e-9,
            "max deviation on linear sequences " + io::fmt_double(worst)};
}

CheckResult check_pose_injection(const ExperimentConfig& cfg, rng::Sequence& rng) {
    const memory::PoseAdapter adapter =
        memory::PoseAdapter::seeded(cfg.p, cfg.d, rng.next_word(), 0.5);
    const LatentChunk xt = random_chunk(rng, cfg.T_z, cfg.d);
    const LatentChunk zero(cfg.T_z, cfg.d);
    PoseTrack poses(cfg.T_z, cfg.p);
    for (auto& f : poses.frames)
        for (double& v : f) v = rng.gauss();
    // additivity: inject(xt, p) - inject(0, p) == xt
    const LatentChunk diff = sub(memory::inject_pose(xt, poses, adapter),
                                 memory::inject_pose(zero, poses, adapter));
    const double err = max_abs_diff(diff, xt);
    return {"memory-pose-injection-additive", err <= 1e-12,
            "max additivity deviation " + io::fmt_double(err)};
}

}  // namespace

std::vector<CheckResult> run_all_checks(const ExperimentConfig& cfg,
                                        const CheckOverrides* overrides) {
    LambdaFn lam = [](double t, double beta) { return flow::lambda_weight(t, beta); };
    if (overrides && overrides->lambda_weight) lam = overrides->lambda_weight;

    rng::Sequence rng(rng::derive(cfg.seed, "checks", "draws"));
    std::vector<CheckResult> results;
    results.push_back(check_interpolant_endpoints(rng));
    results.push_back(check_schedule_boundaries(lam));
    results.push_back(check_schedule_symmetry(lam));
    results.push_back(check_schedule_monotone(lam));
    results.push_back(check_schedule_range(lam));
    results.push_back(check_rfm_subsumes_fm(rng));
    results.push_back(check_additive_decomposition(rng));
    results.push_back(check_one_step_exactness(rng));
    results.push_back(check_restoration_direction(rng));
    results.push_back(check_codec_lossless(cfg, rng));
    results.push_back(check_codec_closed_form(cfg, rng));
    results.push_back(check_codec_monotone(cfg, rng));
    results.push_back(check_codec_determinism(cfg, rng));
    results.push_back(check_gradient(rng));
    results.push_back(check_memory_zero_codec_calls(cfg, rng));
    results.push_back(check_pose_injection(cfg, rng));
    results.push_back(check_sampler_oracle(cfg, rng));
    results.push_back(check_ols_slope(rng));
    return results;
}

bool run_checks(std::ostream& out, const ExperimentConfig& cfg, const CheckOverrides* overrides) {
    const auto results = run_all_checks(cfg, overrides);
    bool all = true;
    for (const auto& r : results) {
        out << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")\n";
        all = all && r.pass;
    }
    out << (all ? "all " : "FAILED: some of ") << results.size() << " checks"
        << (all ? " passed" : " failed") << "\n";
    return all;
}

}  // namespace driftlab::checks
