#pragma once

#include <cstdint>

#include "driftlab/common.hpp"
#include "driftlab/memory.hpp"

namespace driftlab {

inline constexpr int kTimeEmbedDim = 8;  // 4 sine/cosine pairs, geometric frequencies

void time_embedding(double t, double* out);

struct FieldShape {
    int dim = 0;     // latent dimension d; also the output width
    int hidden = 64;

    int input_dim() const { return 2 * dim + kTimeEmbedDim; }
    int param_count() const {
        return hidden * input_dim() + hidden + hidden * hidden + hidden + dim * hidden + dim;
    }
    bool operator==(const FieldShape&) const = default;
};

struct GradientRecord {
    double loss = 0;
    Vec grad;  // aligned with the parameter vector
};

// Velocity model v(H_t, t): a tanh MLP with two hidden layers applied at each
// temporal position with shared weights. Per position the input is the 2d
// channel features (pose-injected target, context slice) plus the time
// embedding; the output is the d-dimensional velocity for that position.
class VectorField {
public:
    explicit VectorField(FieldShape shape);
    static VectorField seeded(FieldShape shape, uint64_t seed);

    LatentChunk evaluate(const memory::ModelInput& input) const;

    // Mean squared error over all target entries plus the analytic
    // reverse-mode gradient with respect to the parameter vector.
    GradientRecord loss_and_grad(const memory::ModelInput& input,
                                 const LatentChunk& target_velocity) const;

    const FieldShape& shape() const { return shape_; }
    const Vec& params() const { return theta_; }
    Vec& params() { return theta_; }

private:
    // parameter layout offsets: [W1 | b1 | W2 | b2 | W3 | b3]
    int w1() const { return 0; }
    int b1() const { return shape_.hidden * shape_.input_dim(); }
    int w2() const { return b1() + shape_.hidden; }
    int b2() const { return w2() + shape_.hidden * shape_.hidden; }
    int w3() const { return b2() + shape_.hidden; }
    int b3() const { return w3() + shape_.dim * shape_.hidden; }

    void position_features(const memory::ModelInput& input, int pos, Vec& out) const;
    void forward(const Vec& in, Vec& a1, Vec& a2, Vec& out) const;

    FieldShape shape_;
    Vec theta_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    Vec m, v;
    long step = 0;

    explicit AdamState(AdamConfig c = {}) : cfg(c) {}
};

void adam_step(VectorField& field, const GradientRecord& grad, AdamState& state);

}  // namespace driftlab
