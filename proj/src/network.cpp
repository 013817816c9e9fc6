#include "bvae/network.hpp"

#include <algorithm>
#include <cmath>

#include "bvae/kernels.hpp"

namespace bvae {

std::string activation_name(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::sigmoid: return "sigmoid";
    }
    throw std::logic_error("activation_name: bad enum");
}

Activation activation_from_name(const std::string& name) {
    if (name == "linear") return Activation::linear;
    if (name == "relu") return Activation::relu;
    if (name == "leaky_relu") return Activation::leaky_relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

void NetworkSpec::validate() const {
    if (input_dim == 0) throw std::invalid_argument("NetworkSpec: input_dim must be >= 1");
    if (layers.empty()) throw std::invalid_argument("NetworkSpec: at least one layer required");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].out_dim == 0)
            throw std::invalid_argument("NetworkSpec: layer " + std::to_string(l) +
                                        " has out_dim 0");
        if (layers[l].act == Activation::leaky_relu && !(layers[l].leaky_slope > 0.0))
            throw std::invalid_argument("NetworkSpec: layer " + std::to_string(l) +
                                        " needs a positive leaky_relu slope");
    }
}

bool NetworkParams::all_finite() const {
    for (const Matrix& w : weights)
        if (!w.all_finite()) return false;
    for (const auto& b : biases)
        for (double x : b)
            if (!std::isfinite(x)) return false;
    return true;
}

void check_params(const NetworkSpec& spec, const NetworkParams& params, const char* where) {
    if (params.weights.size() != spec.layers.size() || params.biases.size() != spec.layers.size())
        throw std::invalid_argument(std::string(where) + ": params have " +
                                    std::to_string(params.weights.size()) + " layers, spec has " +
                                    std::to_string(spec.layers.size()));
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const std::size_t in = spec.layer_input_dim(l), out = spec.layers[l].out_dim;
        if (params.weights[l].rows() != out || params.weights[l].cols() != in)
            throw std::invalid_argument(std::string(where) + ": layer " + std::to_string(l) +
                                        " weight is " + std::to_string(params.weights[l].rows()) +
                                        "x" + std::to_string(params.weights[l].cols()) +
                                        ", expected " + std::to_string(out) + "x" +
                                        std::to_string(in));
        if (params.biases[l].size() != out)
            throw std::invalid_argument(std::string(where) + ": layer " + std::to_string(l) +
                                        " bias has " + std::to_string(params.biases[l].size()) +
                                        " entries, expected " + std::to_string(out));
    }
}

NetworkParams init_params(const NetworkSpec& spec, Rng& rng) {
    spec.validate();
    NetworkParams p;
    p.weights.reserve(spec.layers.size());
    p.biases.reserve(spec.layers.size());
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const std::size_t in = spec.layer_input_dim(l), out = spec.layers[l].out_dim;
        const double a = std::sqrt(6.0 / static_cast<double>(in + out));
        Matrix w(out, in);
        for (std::size_t i = 0; i < w.size(); ++i)
            w.data()[i] = a * (2.0 * rng.uniform() - 1.0);
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(out, 0.0);
    }
    return p;
}

namespace {

void apply_activation(const LayerSpec& ls, const Matrix& z, Matrix& out) {
    const std::size_t n = z.size();
    const double* zp = z.data();
    double* op = out.data();
    switch (ls.act) {
        case Activation::linear:
            std::copy(zp, zp + n, op);
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) op[i] = zp[i] > 0.0 ? zp[i] : 0.0;
            break;
        case Activation::leaky_relu:
            for (std::size_t i = 0; i < n; ++i)
                op[i] = zp[i] > 0.0 ? zp[i] : ls.leaky_slope * zp[i];
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) {
                const double y = 1.0 / (1.0 + std::exp(-zp[i]));
                op[i] = std::clamp(y, kSigmoidClamp, 1.0 - kSigmoidClamp);
            }
            break;
    }
}

// dZ = dY (.) act'(..), using pre-activations for the relu family and the
// clamped outputs for sigmoid.
void activation_backward(const LayerSpec& ls, const Matrix& pre, const Matrix& act,
                         const Matrix& dy, Matrix& dz) {
    const std::size_t n = pre.size();
    const double* pp = pre.data();
    const double* ap = act.data();
    const double* dp = dy.data();
    double* zp = dz.data();
    switch (ls.act) {
        case Activation::linear:
            std::copy(dp, dp + n, zp);
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < n; ++i) zp[i] = pp[i] > 0.0 ? dp[i] : 0.0;
            break;
        case Activation::leaky_relu:
            for (std::size_t i = 0; i < n; ++i)
                zp[i] = pp[i] > 0.0 ? dp[i] : ls.leaky_slope * dp[i];
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < n; ++i) zp[i] = dp[i] * ap[i] * (1.0 - ap[i]);
            break;
    }
}

void add_bias(Matrix& z, const std::vector<double>& b) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
        double* row = z.row(i);
        for (std::size_t j = 0; j < z.cols(); ++j) row[j] += b[j];
    }
}

}  // namespace

Matrix mlp_forward(const NetworkSpec& spec, const NetworkParams& params, const Matrix& batch,
                   ForwardTape* tape) {
    check_params(spec, params, "mlp_forward");
    if (batch.cols() != spec.input_dim)
        throw std::invalid_argument("mlp_forward: batch has " + std::to_string(batch.cols()) +
                                    " columns, layer 0 expects " + std::to_string(spec.input_dim));
    const std::size_t L = spec.layers.size();
    if (tape) {
        tape->acts.assign(1, batch);
        tape->acts.resize(L + 1);
        tape->pre.assign(L, Matrix());
    }

    Matrix cur = batch;
    for (std::size_t l = 0; l < L; ++l) {
        Matrix z;
        kernels::matmul_nt(cur, params.weights[l], z);
        add_bias(z, params.biases[l]);
        Matrix out(z.rows(), z.cols());
        apply_activation(spec.layers[l], z, out);
        if (tape) {
            tape->pre[l] = std::move(z);
            tape->acts[l + 1] = out;
        }
        cur = std::move(out);
    }
    return cur;
}

Gradients zero_gradients(const NetworkSpec& spec) {
    Gradients g;
    g.weights.reserve(spec.layers.size());
    g.biases.reserve(spec.layers.size());
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        g.weights.emplace_back(spec.layers[l].out_dim, spec.layer_input_dim(l));
        g.biases.emplace_back(spec.layers[l].out_dim, 0.0);
    }
    return g;
}

bool Gradients::all_finite() const {
    for (const Matrix& w : weights)
        if (!w.all_finite()) return false;
    for (const auto& b : biases)
        for (double x : b)
            if (!std::isfinite(x)) return false;
    return true;
}

void accumulate(Gradients& into, const Gradients& g) {
    for (std::size_t l = 0; l < into.weights.size(); ++l) {
        require_same_shape(into.weights[l], g.weights[l], "accumulate");
        for (std::size_t i = 0; i < into.weights[l].size(); ++i)
            into.weights[l].data()[i] += g.weights[l].data()[i];
        for (std::size_t i = 0; i < into.biases[l].size(); ++i)
            into.biases[l][i] += g.biases[l][i];
    }
}

Gradients mlp_backward(const NetworkSpec& spec, const NetworkParams& params,
                       const ForwardTape& tape, const Matrix& out_grad, Matrix* input_grad) {
    const std::size_t L = spec.layers.size();
    if (tape.acts.size() != L + 1 || tape.pre.size() != L)
        throw std::invalid_argument("mlp_backward: tape does not match spec");
    if (!out_grad.same_shape(tape.acts[L]))
        throw std::invalid_argument("mlp_backward: out_grad is " +
                                    std::to_string(out_grad.rows()) + "x" +
                                    std::to_string(out_grad.cols()) + ", output was " +
                                    std::to_string(tape.acts[L].rows()) + "x" +
                                    std::to_string(tape.acts[L].cols()));

    Gradients g = zero_gradients(spec);
    Matrix dy = out_grad;
    Matrix dz;
    for (std::size_t l = L; l-- > 0;) {
        dz = Matrix(dy.rows(), dy.cols());
        activation_backward(spec.layers[l], tape.pre[l], tape.acts[l + 1], dy, dz);
        kernels::matmul_tn(dz, tape.acts[l], g.weights[l]);
        for (std::size_t i = 0; i < dz.rows(); ++i) {
            const double* row = dz.row(i);
            for (std::size_t j = 0; j < dz.cols(); ++j) g.biases[l][j] += row[j];
        }
        if (l > 0 || input_grad) kernels::matmul(dz, params.weights[l], dy);
    }
    if (input_grad) *input_grad = std::move(dy);
    return g;
}

GaussianLatent split_latent(const Matrix& encoder_out) {
    if (encoder_out.cols() % 2 != 0)
        throw std::invalid_argument("split_latent: odd encoder output width " +
                                    std::to_string(encoder_out.cols()));
    const std::size_t latent = encoder_out.cols() / 2;
    return {col_slice(encoder_out, 0, latent), col_slice(encoder_out, latent, 2 * latent)};
}

Matrix reparameterize(const GaussianLatent& latent, const Matrix& noise) {
    require_same_shape(latent.mu, latent.log_var, "reparameterize");
    require_same_shape(latent.mu, noise, "reparameterize");
    Matrix z(latent.mu.rows(), latent.mu.cols());
    for (std::size_t i = 0; i < z.size(); ++i)
        z.data()[i] = latent.mu.data()[i] +
                      std::exp(0.5 * latent.log_var.data()[i]) * noise.data()[i];
    return z;
}

void reparameterize_backward(const GaussianLatent& latent, const Matrix& noise, const Matrix& dz,
                             Matrix& dmu, Matrix& dlog_var) {
    require_same_shape(dz, latent.mu, "reparameterize_backward");
    require_same_shape(dmu, latent.mu, "reparameterize_backward");
    require_same_shape(dlog_var, latent.mu, "reparameterize_backward");
    for (std::size_t i = 0; i < dz.size(); ++i) {
        dmu.data()[i] += dz.data()[i];
        dlog_var.data()[i] +=
            dz.data()[i] * noise.data()[i] * 0.5 * std::exp(0.5 * latent.log_var.data()[i]);
    }
}

}  // namespace bvae
