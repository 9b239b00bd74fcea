#include <cmath>

#include "doctest.h"
#include "driftlab/flow.hpp"
#include "driftlab/rng.hpp"

using namespace driftlab;

namespace {

LatentChunk chunk1(std::initializer_list<double> vals) {
    LatentChunk c(1, static_cast<int>(vals.size()));
    int i = 0;
    for (double v : vals) c.frames[0][i++] = v;
    return c;
}

LatentChunk random_chunk(rng::Sequence& rng, int len, int dim) {
    LatentChunk c(len, dim);
    for (auto& f : c.frames)
        for (double& v : f) v = rng.gauss();
    return c;
}

// frozen with an 40-digit evaluation of Eq.-form (exp(-b(t-1/2)^2)-exp(-b/4))/(1-exp(-b/4))
constexpr double kLambdaQuarterBeta16 = 0.35608574011202768824;

}  // namespace

TEST_CASE("interpolate midpoint and endpoint identities") {
    CHECK(max_abs_diff(flow::interpolate(chunk1({0, 0}), chunk1({2, 4}), 0.5), chunk1({1, 2})) == 0);
    const LatentChunk v = chunk1({3.5, -2.0, 0.25});
    for (double t : {0.0, 0.3, 1.0})
        CHECK(max_abs_diff(flow::interpolate(v, v, t), v) < 1e-15);
    CHECK(max_abs_diff(flow::interpolate(chunk1({1, -1}), chunk1({3, 5}), 0.25), chunk1({1.5, 0.5})) <
          1e-15);

    rng::Sequence rng(rng::derive(1, "test", "interp"));
    for (int rep = 0; rep < 50; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 3, 5);
        const LatentChunk x1 = random_chunk(rng, 3, 5);
        CHECK(max_abs_diff(flow::interpolate(x0, x1, 0.0), x0) == 0);
        CHECK(max_abs_diff(flow::interpolate(x0, x1, 1.0), x1) == 0);
    }
}

TEST_CASE("interpolate rejects bad shapes and t outside [0,1]") {
    CHECK_THROWS_AS(flow::interpolate(chunk1({1, 2}), chunk1({1, 2, 3}), 0.5), DimensionError);
    CHECK_THROWS_AS(flow::interpolate(chunk1({1}), chunk1({2}), 1.5), DomainError);
    CHECK_THROWS_AS(flow::interpolate(chunk1({1}), chunk1({2}), -0.1), DomainError);
}

TEST_CASE("fm_velocity is the endpoint difference") {
    const LatentChunk v = chunk1({0.7, -1.3});
    CHECK(max_abs_diff(flow::fm_velocity(chunk1({0, 0}), v), v) == 0);
    CHECK(l2_norm(flow::fm_velocity(v, v)) == 0);
    CHECK(max_abs_diff(flow::fm_velocity(chunk1({1, 2}), chunk1({4, 0})), chunk1({3, -2})) == 0);
    CHECK_THROWS_AS(flow::fm_velocity(chunk1({1}), chunk1({1, 2})), DimensionError);
}

TEST_CASE("exact restorative velocity lands on the clean endpoint") {
    // scalar: x0=0, x1=1, x1_tilde=1.5, t=0.5 -> xt_tilde=0.75 -> velocity 0.5
    const LatentChunk xt_tilde = flow::interpolate(chunk1({0.0}), chunk1({1.5}), 0.5);
    CHECK(xt_tilde.frames[0][0] == doctest::Approx(0.75));
    const LatentChunk v = flow::exact_restorative_velocity(chunk1({1.0}), xt_tilde, 0.5);
    CHECK(v.frames[0][0] == doctest::Approx(0.5));

    rng::Sequence rng(rng::derive(2, "test", "exact"));
    for (int rep = 0; rep < 200; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 6);
        const LatentChunk x1 = random_chunk(rng, 2, 6);
        const LatentChunk x1t = random_chunk(rng, 2, 6);
        const double t = rng.uniform(0.0, 1.0 - flow::kSingularityEps);

        // no perturbation: reduces to the standard FM velocity
        const LatentChunk xt = flow::interpolate(x0, x1, t);
        CHECK(max_abs_diff(flow::exact_restorative_velocity(x1, xt, t), flow::fm_velocity(x0, x1)) <
              1e-10);

        // one Euler step of size (1-t) lands exactly on x1
        const LatentChunk xtt = flow::interpolate(x0, x1t, t);
        LatentChunk landed = xtt;
        axpy(landed, 1.0 - t, flow::exact_restorative_velocity(x1, xtt, t));
        CHECK(max_abs_diff(landed, x1) < 1e-12);
    }

    // already at the endpoint: zero velocity
    const LatentChunk x1 = chunk1({2.0, -1.0});
    CHECK(l2_norm(flow::exact_restorative_velocity(x1, x1, 0.7)) == 0);

    CHECK_THROWS_AS(flow::exact_restorative_velocity(x1, x1, 1.0 - 1e-4), DomainError);
    CHECK_THROWS_AS(flow::exact_restorative_velocity(x1, x1, -0.1), DomainError);
}

TEST_CASE("lambda weight boundary values, peak and frozen point") {
    for (double beta : {4.0, 16.0, 64.0}) {
        CHECK(flow::lambda_weight(0.0, beta) == 0.0);
        CHECK(flow::lambda_weight(1.0, beta) == 0.0);
        CHECK(flow::lambda_weight(0.5, beta) == 1.0);
    }
    CHECK(std::abs(flow::lambda_weight(0.25, 16.0) - kLambdaQuarterBeta16) < 1e-12);
    CHECK_THROWS_AS(flow::lambda_weight(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(flow::lambda_weight(0.5, -1.0), DomainError);
    CHECK_THROWS_AS(flow::lambda_weight(1.5, 4.0), DomainError);
}

TEST_CASE("lambda weight schedule properties on a grid") {
    for (double beta : {4.0, 16.0, 64.0}) {
        double prev = flow::lambda_weight(0.0, beta);
        for (int i = 1; i <= 1000; ++i) {
            const double t = i / 1000.0;
            const double lam = flow::lambda_weight(t, beta);
            CHECK(lam >= -1e-12);
            CHECK(lam <= 1.0 + 1e-12);
            CHECK(std::abs(lam - flow::lambda_weight(1.0 - t, beta)) <= 1e-12);
            if (t <= 0.5) CHECK(lam >= prev - 1e-12);
            prev = lam;
        }
    }
}

TEST_CASE("restorative velocity subsumes FM and matches the hand oracle") {
    rng::Sequence rng(rng::derive(3, "test", "restorative"));
    for (int rep = 0; rep < 100; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 6);
        const LatentChunk x1 = random_chunk(rng, 2, 6);
        const double t = rng.uniform();
        const double beta = rng.uniform(1.0, 64.0);
        CHECK(max_abs_diff(flow::restorative_velocity(x0, x1, x1, t, beta),
                           flow::fm_velocity(x0, x1)) <= 1e-12);
    }

    // scalar: U=1, lambda(1/2)=1, xt-xt_tilde = -0.25 -> 0.75
    const LatentChunk v =
        flow::restorative_velocity(chunk1({0.0}), chunk1({1.0}), chunk1({1.5}), 0.5, 16.0);
    CHECK(v.frames[0][0] == doctest::Approx(0.75));

    // t=0: lambda(0)=0, equals FM regardless of the perturbed endpoint
    const LatentChunk x0 = chunk1({1.0, 2.0});
    const LatentChunk x1 = chunk1({-1.0, 0.5});
    const LatentChunk x1t = chunk1({10.0, -10.0});
    CHECK(max_abs_diff(flow::restorative_velocity(x0, x1, x1t, 0.0, 16.0),
                       flow::fm_velocity(x0, x1)) == 0);

    CHECK_THROWS_AS(flow::restorative_velocity(x0, x1, chunk1({1.0}), 0.5, 16.0), DimensionError);
}

TEST_CASE("restoration term is bounded by lambda and aligned with the gap") {
    rng::Sequence rng(rng::derive(4, "test", "bound"));
    for (int rep = 0; rep < 200; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 2, 8);
        const LatentChunk x1 = random_chunk(rng, 2, 8);
        const LatentChunk x1t = random_chunk(rng, 2, 8);
        const double t = rng.uniform();
        const double beta = rng.uniform(1.0, 64.0);
        const LatentChunk u = flow::fm_velocity(x0, x1);
        const LatentChunk u_tilde = flow::restorative_velocity(x0, x1, x1t, t, beta);
        const LatentChunk gap = sub(flow::interpolate(x0, x1, t), flow::interpolate(x0, x1t, t));
        // lambda <= 1: || u_tilde || <= || u || + || xt - xt_tilde ||
        CHECK(l2_norm(u_tilde) <= l2_norm(u) + l2_norm(gap) + 1e-12);
        // correction points from the perturbed state toward the clean path
        CHECK(dot(sub(u_tilde, u), gap) >= -1e-12);
    }
}

TEST_CASE("additive decomposition of the exact velocity is an identity") {
    CHECK(flow::decomposition_residual(chunk1({0.0}), chunk1({1.0}), chunk1({1.5}), 0.5) < 1e-12);
    const LatentChunk x1 = chunk1({1.0, -2.0});
    CHECK(flow::decomposition_residual(chunk1({0.2, 0.4}), x1, x1, 0.3) < 1e-13);

    rng::Sequence rng(rng::derive(5, "test", "decomp"));
    double worst = 0;
    for (int rep = 0; rep < 2000; ++rep) {
        const LatentChunk x0 = random_chunk(rng, 1, 8);
        const LatentChunk x1r = random_chunk(rng, 1, 8);
        const LatentChunk x1t = random_chunk(rng, 1, 8);
        worst = std::max(worst, flow::decomposition_residual(x0, x1r, x1t, 0.3));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("flow sample structs satisfy their invariants") {
    rng::Sequence rng(rng::derive(6, "test", "samples"));
    const LatentChunk x0 = random_chunk(rng, 3, 4);
    const LatentChunk x1 = random_chunk(rng, 3, 4);
    const LatentChunk x1t = random_chunk(rng, 3, 4);

    const flow::FlowSample fs = flow::make_flow_sample(x0, x1, 0.4);
    CHECK(max_abs_diff(fs.xt, flow::interpolate(x0, x1, 0.4)) == 0);
    CHECK(max_abs_diff(fs.u, flow::fm_velocity(x0, x1)) == 0);

    const flow::PerturbedFlowSample ps = flow::make_perturbed_sample(x0, x1, x1t, 0.4, 16.0);
    CHECK(max_abs_diff(ps.xt_tilde, flow::interpolate(x0, x1t, 0.4)) == 0);
    CHECK(max_abs_diff(ps.u_tilde, flow::restorative_velocity(x0, x1, x1t, 0.4, 16.0)) == 0);
    CHECK(ps.base.t == 0.4);
}
