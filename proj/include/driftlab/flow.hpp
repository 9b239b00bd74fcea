#pragma once

#include "driftlab/common.hpp"

namespace driftlab::flow {

// 1/(1-t) grows without bound; the exact restorative velocity refuses
// t >= 1 - kSingularityEps. The rescheduled velocity has no singularity.
inline constexpr double kSingularityEps = 1e-3;
inline constexpr double kDefaultBeta = 16.0;

// Linear interpolant (1-t)*x0 + t*x1.
LatentChunk interpolate(const LatentChunk& x0, const LatentChunk& x1, double t);

// Constant target velocity x1 - x0 of the linear path.
LatentChunk fm_velocity(const LatentChunk& x0, const LatentChunk& x1);

// Constant velocity that carries xt_tilde onto x1 over the remaining
// interval: (x1 - xt_tilde) / (1 - t). One Euler step of size (1-t) from
// xt_tilde lands exactly on x1.
LatentChunk exact_restorative_velocity(const LatentChunk& x1, const LatentChunk& xt_tilde,
                                       double t, double eps = kSingularityEps);

// Gaussian restoration weight, normalized so lambda(0)=lambda(1)=0 and
// lambda(1/2)=1:  (exp(-beta (t-1/2)^2) - exp(-beta/4)) / (1 - exp(-beta/4)).
double lambda_weight(double t, double beta);

// Rescheduled restorative velocity: fm_velocity + lambda(t) * (xt - xt_tilde),
// where both interpolants share x0. With x1_tilde == x1 this is plain FM.
LatentChunk restorative_velocity(const LatentChunk& x0, const LatentChunk& x1,
                                 const LatentChunk& x1_tilde, double t, double beta);

// Max-norm residual of the additive decomposition
//   exact == fm_velocity + (1/(1-t)) (xt - xt_tilde),
// an algebraic identity; stays below 1e-10 for any finite inputs.
double decomposition_residual(const LatentChunk& x0, const LatentChunk& x1,
                              const LatentChunk& x1_tilde, double t,
                              double eps = kSingularityEps);

struct FlowSample {
    LatentChunk x0;  // Gaussian source endpoint
    LatentChunk x1;  // clean endpoint
    double t = 0;
    LatentChunk xt;  // (1-t) x0 + t x1
    LatentChunk u;   // x1 - x0
};

FlowSample make_flow_sample(LatentChunk x0, LatentChunk x1, double t);

struct PerturbedFlowSample {
    FlowSample base;
    LatentChunk x1_tilde;  // perturbed endpoint
    LatentChunk xt_tilde;  // (1-t) x0 + t x1_tilde
    LatentChunk u_tilde;   // u + lambda(t) (xt - xt_tilde)
    double beta = kDefaultBeta;
};

PerturbedFlowSample make_perturbed_sample(LatentChunk x0, LatentChunk x1, LatentChunk x1_tilde,
                                          double t, double beta);

}  // namespace driftlab::flow
