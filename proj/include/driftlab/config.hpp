#pragma once

#include <cstdint>
#include <string>

#include "driftlab/common.hpp"

namespace driftlab {

// One versioned document holding every experiment parameter. Field names
// follow the symbols used throughout the project (T_z, L, N, r, K, m, beta,
// gamma, S, ...). Parsing validates every module precondition up front.
struct ExperimentConfig {
    int version = 1;
    uint64_t seed = 42;

    // dimensions
    int d = 32;             // latent dimension == pixel dimension
    int p = 4;              // pose dimension
    int identity_dim = 8;

    // chunking
    int T_z = 6;  // compressed chunk length; the surrogate codec keeps T_z == L
    int L = 6;    // frames per chunk
    int N = 8;    // chunks per scene

    // memory
    int r = 1;
    int K = 4;
    int m = 1;
    bool augment = true;
    double augment_magnitude = 1.0;

    // flow
    double beta = 16.0;
    double epsilon = 1e-3;

    // codec
    double gamma = 0.97;
    double noise_sigma = 0.005;

    // sampler
    int S = 20;

    // field
    int hidden = 64;

    // training
    int stage1_iters = 400;
    int stage2_iters = 100;
    int batch_size = 16;
    double lr = 1e-3;
    int train_scenes = 64;
    int eval_scenes = 8;
    double perturb_max = 0.15;

    // rollout
    std::string mode = "latent_plp_rfm";

    // roundtrip bench
    int bench_rounds = 20;

    void validate() const;  // throws ConfigError

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    // canonical form: sorted keys, fixed indentation; parse(canonical()) round-trips
    std::string canonical() const;
    std::string hash() const;  // fnv1a hex of the canonical form
};

}  // namespace driftlab
