#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bvae/matrix.hpp"
#include "bvae/rng.hpp"

namespace bvae {

enum class Activation { linear, relu, leaky_relu, sigmoid };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Sigmoid outputs are clamped to [kSigmoidClamp, 1 - kSigmoidClamp] so they
// can enter logarithms.
inline constexpr double kSigmoidClamp = 1e-7;

struct LayerSpec {
    std::size_t out_dim = 0;
    Activation act = Activation::linear;
    double leaky_slope = 0.2;  // leaky_relu only
};

struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<LayerSpec> layers;

    std::size_t output_dim() const { return layers.back().out_dim; }
    std::size_t layer_input_dim(std::size_t l) const {
        return l == 0 ? input_dim : layers[l - 1].out_dim;
    }
    void validate() const;
};

// Weight matrix of layer l is (out_dim x in_dim); bias has out_dim entries.
struct NetworkParams {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    bool all_finite() const;
};

void check_params(const NetworkSpec& spec, const NetworkParams& params, const char* where);

// Uniform in [-a, a] with a = sqrt(6 / (fan_in + fan_out)); biases zero.
NetworkParams init_params(const NetworkSpec& spec, Rng& rng);

// acts[0] is the batch, acts[l + 1] the (post-activation) output of layer l;
// pre[l] the pre-activation. Everything mlp_backward needs.
struct ForwardTape {
    std::vector<Matrix> acts;
    std::vector<Matrix> pre;

    const Matrix& output() const { return acts.back(); }
};

// Returns the final activation; fills the tape when one is given.
Matrix mlp_forward(const NetworkSpec& spec, const NetworkParams& params, const Matrix& batch,
                   ForwardTape* tape = nullptr);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    bool all_finite() const;
};

Gradients zero_gradients(const NetworkSpec& spec);
void accumulate(Gradients& into, const Gradients& g);

// Exact gradients of a scalar loss w.r.t. every weight, bias and (optionally)
// the input batch, given dLoss/dOutput.
Gradients mlp_backward(const NetworkSpec& spec, const NetworkParams& params,
                       const ForwardTape& tape, const Matrix& out_grad,
                       Matrix* input_grad = nullptr);

// Diagonal Gaussian over a batch: mu and log_var are (batch x latent).
struct GaussianLatent {
    Matrix mu;
    Matrix log_var;
};

// Splits an encoder output (batch x 2L) into mu (first L columns) and
// log_var (last L columns).
GaussianLatent split_latent(const Matrix& encoder_out);

// z = mu + exp(log_var / 2) * noise, elementwise.
Matrix reparameterize(const GaussianLatent& latent, const Matrix& noise);

// Accumulates dLoss/dmu and dLoss/dlog_var given dLoss/dz.
void reparameterize_backward(const GaussianLatent& latent, const Matrix& noise, const Matrix& dz,
                             Matrix& dmu, Matrix& dlog_var);

}  // namespace bvae
