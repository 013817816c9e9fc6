#pragma once

#include "bvae/network.hpp"

namespace bvae {

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(const NetworkSpec& spec);

// One bias-corrected Adam update. Rejects non-finite gradients so a diverged
// training run aborts instead of poisoning the parameters.
void adam_step(NetworkParams& params, const Gradients& grads, AdamState& state, double lr);

}  // namespace bvae
