#include "driftlab/field.hpp"

#include <cmath>
#include <string>

#include "driftlab/rng.hpp"

namespace driftlab {

void time_embedding(double t, double* out) {
    double w = M_PI;
    for (int j = 0; j < kTimeEmbedDim / 2; ++j) {
        out[2 * j] = std::sin(w * t);
        out[2 * j + 1] = std::cos(w * t);
        w *= 2.0;
    }
}

VectorField::VectorField(FieldShape shape) : shape_(shape), theta_(shape.param_count(), 0.0) {
    if (shape_.dim < 1 || shape_.hidden < 1)
        throw ConfigError("vector field: dim and hidden must be >= 1");
}

VectorField VectorField::seeded(FieldShape shape, uint64_t seed) {
    VectorField f(shape);
    rng::Sequence rng(seed);
    const int n_in = shape.input_dim();
    const int h = shape.hidden;
    auto fill = [&](int off, int rows, int cols) {
        const double s = 1.0 / std::sqrt(static_cast<double>(cols));
        for (int i = 0; i < rows * cols; ++i) f.theta_[off + i] = s * rng.gauss();
    };
    fill(f.w1(), h, n_in);
    fill(f.w2(), h, h);
    fill(f.w3(), shape.dim, h);
    // biases stay zero
    return f;
}

void VectorField::position_features(const memory::ModelInput& input, int pos, Vec& out) const {
    const int d = shape_.dim;
    out.resize(shape_.input_dim());
    const Vec& target = input.target.frames[pos];
    const Vec ctx = input.context.slice(pos);
    for (int i = 0; i < d; ++i) out[i] = target[i];
    for (int i = 0; i < d; ++i) out[d + i] = ctx[i];
    time_embedding(input.t, out.data() + 2 * d);
}

void VectorField::forward(const Vec& in, Vec& a1, Vec& a2, Vec& out) const {
    const int n_in = shape_.input_dim();
    const int h = shape_.hidden;
    const int d = shape_.dim;
    a1.resize(h);
    a2.resize(h);
    out.resize(d);
    const double* W1 = theta_.data() + w1();
    const double* B1 = theta_.data() + b1();
    const double* W2 = theta_.data() + w2();
    const double* B2 = theta_.data() + b2();
    const double* W3 = theta_.data() + w3();
    const double* B3 = theta_.data() + b3();
    for (int i = 0; i < h; ++i) {
        double s = B1[i];
        const double* row = W1 + i * n_in;
        for (int j = 0; j < n_in; ++j) s += row[j] * in[j];
        a1[i] = std::tanh(s);
    }
    for (int i = 0; i < h; ++i) {
        double s = B2[i];
        const double* row = W2 + i * h;
        for (int j = 0; j < h; ++j) s += row[j] * a1[j];
        a2[i] = std::tanh(s);
    }
    for (int o = 0; o < d; ++o) {
        double s = B3[o];
        const double* row = W3 + o * h;
        for (int j = 0; j < h; ++j) s += row[j] * a2[j];
        out[o] = s;
    }
}

LatentChunk VectorField::evaluate(const memory::ModelInput& input) const {
    if (input.target.dim != shape_.dim)
        throw DimensionError("vector field: input dim " + std::to_string(input.target.dim) +
                             ", model dim " + std::to_string(shape_.dim));
    LatentChunk out(input.target.len(), shape_.dim);
    Vec feat, a1, a2;
    for (int pos = 0; pos < input.target.len(); ++pos) {
        position_features(input, pos, feat);
        forward(feat, a1, a2, out.frames[pos]);
    }
    return out;
}

GradientRecord VectorField::loss_and_grad(const memory::ModelInput& input,
                                          const LatentChunk& target_velocity) const {
    if (input.target.dim != shape_.dim)
        throw DimensionError("loss_and_grad: input dim mismatch");
    check_same_shape(input.target, target_velocity, "loss_and_grad");

    const int n_in = shape_.input_dim();
    const int h = shape_.hidden;
    const int d = shape_.dim;
    const int positions = input.target.len();
    const double inv_n = 1.0 / (static_cast<double>(positions) * d);

    GradientRecord rec;
    rec.grad.assign(theta_.size(), 0.0);
    double* gW1 = rec.grad.data() + w1();
    double* gB1 = rec.grad.data() + b1();
    double* gW2 = rec.grad.data() + w2();
    double* gB2 = rec.grad.data() + b2();
    double* gW3 = rec.grad.data() + w3();
    double* gB3 = rec.grad.data() + b3();
    const double* W2 = theta_.data() + w2();
    const double* W3 = theta_.data() + w3();

    Vec feat, a1, a2, out, d_out(d), d_a2(h), d_a1(h);
    for (int pos = 0; pos < positions; ++pos) {
        position_features(input, pos, feat);
        forward(feat, a1, a2, out);
        for (int o = 0; o < d; ++o) {
            const double r = out[o] - target_velocity.frames[pos][o];
            if (!std::isfinite(r))
                throw NumericError("loss_and_grad: non-finite forward value at position " +
                                   std::to_string(pos) + ", channel " + std::to_string(o));
            rec.loss += r * r * inv_n;
            d_out[o] = 2.0 * r * inv_n;
        }
        // output layer
        for (int o = 0; o < d; ++o) {
            gB3[o] += d_out[o];
            double* grow = gW3 + o * h;
            for (int j = 0; j < h; ++j) grow[j] += d_out[o] * a2[j];
        }
        // second hidden layer (tanh' = 1 - a^2)
        for (int j = 0; j < h; ++j) {
            double s = 0;
            for (int o = 0; o < d; ++o) s += d_out[o] * W3[o * h + j];
            d_a2[j] = s * (1.0 - a2[j] * a2[j]);
        }
        for (int i = 0; i < h; ++i) {
            gB2[i] += d_a2[i];
            double* grow = gW2 + i * h;
            for (int j = 0; j < h; ++j) grow[j] += d_a2[i] * a1[j];
        }
        // first hidden layer
        for (int j = 0; j < h; ++j) {
            double s = 0;
            for (int i = 0; i < h; ++i) s += d_a2[i] * W2[i * h + j];
            d_a1[j] = s * (1.0 - a1[j] * a1[j]);
        }
        for (int i = 0; i < h; ++i) {
            gB1[i] += d_a1[i];
            double* grow = gW1 + i * n_in;
            for (int j = 0; j < n_in; ++j) grow[j] += d_a1[i] * feat[j];
        }
    }
    return rec;
}

void adam_step(VectorField& field, const GradientRecord& grad, AdamState& state) {
    Vec& theta = field.params();
    if (grad.grad.size() != theta.size())
        throw DimensionError("adam_step: gradient length mismatch");
    if (state.m.empty()) {
        state.m.assign(theta.size(), 0.0);
        state.v.assign(theta.size(), 0.0);
    }
    state.step += 1;
    const AdamConfig& c = state.cfg;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < theta.size(); ++i) {
        const double g = grad.grad[i];
        if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient entry");
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * g;
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        const double upd = c.lr * mhat / (std::sqrt(vhat) + c.eps);
        if (!std::isfinite(upd)) throw NumericError("adam_step: non-finite update");
        theta[i] -= upd;
    }
}

}  // namespace driftlab
