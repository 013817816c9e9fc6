#include "bvae/adam.hpp"

#include <cmath>

namespace bvae {

AdamState make_adam_state(const NetworkSpec& spec) {
    AdamState s;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const std::size_t out = spec.layers[l].out_dim, in = spec.layer_input_dim(l);
        s.m_w.emplace_back(out, in);
        s.v_w.emplace_back(out, in);
        s.m_b.emplace_back(out, 0.0);
        s.v_b.emplace_back(out, 0.0);
    }
    return s;
}

namespace {

void update(double* p, const double* g, double* m, double* v, std::size_t n, double lr,
            const AdamState& s, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
    }
}

}  // namespace

void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("adam_step: lr must be > 0");
    if (params.weights.size() != grads.weights.size() ||
        params.weights.size() != state.m_w.size())
        throw std::invalid_argument("adam_step: layer count mismatch");
    if (!grads.all_finite())
        throw std::runtime_error("adam_step: non-finite gradient, aborting the update");

    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        require_same_shape(params.weights[l], grads.weights[l], "adam_step");
        update(params.weights[l].data(), grads.weights[l].data(), state.m_w[l].data(),
               state.v_w[l].data(), params.weights[l].size(), lr, state, bc1, bc2);
        if (params.biases[l].size() != grads.biases[l].size())
            throw std::invalid_argument("adam_step: bias size mismatch at layer " +
                                        std::to_string(l));
        update(params.biases[l].data(), grads.biases[l].data(), state.m_b[l].data(),
               state.v_b[l].data(), params.biases[l].size(), lr, state, bc1, bc2);
    }
}

}  // namespace bvae
