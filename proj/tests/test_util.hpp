#pragma once

#include <cmath>
#include <functional>

#include "bvae/network.hpp"
#include "bvae/rng.hpp"

namespace bvae::testing {

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0,
                            double hi = 1.0) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = lo + (hi - lo) * rng.uniform();
    return m;
}

inline double rel_err(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / denom;
}

// Central finite difference of a scalar function w.r.t. one location.
inline double central_diff(double& slot, const std::function<double()>& f, double h = 1e-5) {
    const double saved = slot;
    slot = saved + h;
    const double up = f();
    slot = saved - h;
    const double down = f();
    slot = saved;
    return (up - down) / (2.0 * h);
}

// Checks every parameter gradient of `params` against central differences of
// `loss`. Returns the worst relative error.
inline double max_param_grad_err(NetworkParams& params, const Gradients& grads,
                                 const std::function<double()>& loss, double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t i = 0; i < params.weights[l].size(); ++i) {
            const double fd = central_diff(params.weights[l].data()[i], loss, h);
            worst = std::max(worst, rel_err(fd, grads.weights[l].data()[i]));
        }
        for (std::size_t i = 0; i < params.biases[l].size(); ++i) {
            const double fd = central_diff(params.biases[l][i], loss, h);
            worst = std::max(worst, rel_err(fd, grads.biases[l][i]));
        }
    }
    return worst;
}

}  // namespace bvae::testing
