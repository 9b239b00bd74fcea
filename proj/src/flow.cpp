#include "driftlab/flow.hpp"

#include <cmath>
#include <string>

namespace driftlab::flow {

LatentChunk interpolate(const LatentChunk& x0, const LatentChunk& x1, double t) {
    check_same_shape(x0, x1, "interpolate");
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("interpolate: t=" + std::to_string(t) + " outside [0,1]");
    LatentChunk out = x0;
    const double a = 1.0 - t;
    for (int f = 0; f < x0.len(); ++f)
        for (int i = 0; i < x0.dim; ++i) out.frames[f][i] = a * x0.frames[f][i] + t * x1.frames[f][i];
    return out;
}

LatentChunk fm_velocity(const LatentChunk& x0, const LatentChunk& x1) {
    return sub(x1, x0);
}

LatentChunk exact_restorative_velocity(const LatentChunk& x1, const LatentChunk& xt_tilde,
                                       double t, double eps) {
    check_same_shape(x1, xt_tilde, "exact_restorative_velocity");
    if (!(t >= 0.0))
        throw DomainError("exact_restorative_velocity: t=" + std::to_string(t) + " negative");
    if (t >= 1.0 - eps)
        throw DomainError("exact_restorative_velocity: t=" + std::to_string(t) +
                          " inside the singularity guard (t >= 1-eps)");
    return scale(sub(x1, xt_tilde), 1.0 / (1.0 - t));
}

double lambda_weight(double t, double beta) {
    if (!(beta > 0.0))
        throw DomainError("lambda_weight: beta=" + std::to_string(beta) + " must be positive");
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("lambda_weight: t=" + std::to_string(t) + " outside [0,1]");
    const double tail = std::exp(-beta / 4.0);
    return (std::exp(-beta * (t - 0.5) * (t - 0.5)) - tail) / (1.0 - tail);
}

LatentChunk restorative_velocity(const LatentChunk& x0, const LatentChunk& x1,
                                 const LatentChunk& x1_tilde, double t, double beta) {
    check_same_shape(x0, x1, "restorative_velocity");
    check_same_shape(x0, x1_tilde, "restorative_velocity");
    LatentChunk u = fm_velocity(x0, x1);
    const double lam = lambda_weight(t, beta);
    // xt - xt_tilde collapses to t * (x1 - x1_tilde); computed that way to
    // avoid the cancellation of two nearly equal interpolants.
    for (int f = 0; f < u.len(); ++f)
        for (int i = 0; i < u.dim; ++i)
            u.frames[f][i] += lam * t * (x1.frames[f][i] - x1_tilde.frames[f][i]);
    return u;
}

double decomposition_residual(const LatentChunk& x0, const LatentChunk& x1,
                              const LatentChunk& x1_tilde, double t, double eps) {
    const LatentChunk xt = interpolate(x0, x1, t);
    const LatentChunk xt_tilde = interpolate(x0, x1_tilde, t);
    const LatentChunk exact = exact_restorative_velocity(x1, xt_tilde, t, eps);

    LatentChunk decomposed = fm_velocity(x0, x1);
    axpy(decomposed, 1.0 / (1.0 - t), sub(xt, xt_tilde));
    return max_abs_diff(exact, decomposed);
}

FlowSample make_flow_sample(LatentChunk x0, LatentChunk x1, double t) {
    FlowSample s;
    s.xt = interpolate(x0, x1, t);
    s.u = fm_velocity(x0, x1);
    s.x0 = std::move(x0);
    s.x1 = std::move(x1);
    s.t = t;
    return s;
}

PerturbedFlowSample make_perturbed_sample(LatentChunk x0, LatentChunk x1, LatentChunk x1_tilde,
                                          double t, double beta) {
    PerturbedFlowSample p;
    p.xt_tilde = interpolate(x0, x1_tilde, t);
    p.u_tilde = restorative_velocity(x0, x1, x1_tilde, t, beta);
    p.base = make_flow_sample(std::move(x0), std::move(x1), t);
    p.x1_tilde = std::move(x1_tilde);
    p.beta = beta;
    return p;
}

}  // namespace driftlab::flow
