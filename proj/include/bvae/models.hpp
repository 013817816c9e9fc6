#pragma once

#include "bvae/adam.hpp"
#include "bvae/losses.hpp"

namespace bvae {

inline constexpr std::size_t kDefaultComponents = 99;

// One VAE: encoder emits (mu || log_var), decoder ends in a clamped sigmoid.
// cond_dim > 0 marks a conditional VAE whose condition vector is appended to
// both the encoder and the decoder input.
struct VaeModel {
    NetworkSpec enc_spec, dec_spec;
    NetworkParams enc, dec;
    std::size_t latent_dim = 0;
    std::size_t cond_dim = 0;
};

// 512/1024/256 stacks, latent 128.
VaeModel make_vanilla_vae(std::size_t p, Rng& rng);
// 512/1024/256 stacks, latent 64.
VaeModel make_mask_vae(std::size_t p, Rng& rng);
// 256/256 stacks, latent 32, conditioned on a p-wide soft mask.
VaeModel make_ratio_vae(std::size_t p, Rng& rng);

struct VaeOptimizer {
    AdamState enc, dec;
};
VaeOptimizer make_vae_optimizer(const VaeModel& m);

// Mask VAE chained into a conditional ratio VAE; trained jointly so the
// ratio reconstruction error reaches back into the mask parameters.
struct BvaeModel {
    VaeModel mask;
    VaeModel ratio;
    LossWeights weights;
};
BvaeModel make_bvae(std::size_t p, const LossWeights& w, Rng& rng);

struct BvaeOptimizer {
    VaeOptimizer mask, ratio;
};
BvaeOptimizer make_bvae_optimizer(const BvaeModel& m);

// Generator noise(1024) -> 512 -> 1024 -> 256 -> p (linear out),
// discriminator p -> 512 -> 1024 -> 256 -> 1 (sigmoid), LeakyReLU(0.2).
struct GanModel {
    NetworkSpec gen_spec, disc_spec;
    NetworkParams gen, disc;
    std::size_t noise_dim = 1024;
};
GanModel make_gan(std::size_t p, Rng& rng);

struct GanOptimizer {
    AdamState gen, disc;
};
GanOptimizer make_gan_optimizer(const GanModel& m);

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 128;
    double lr_mask = 1e-3;
    double lr_ratio = 1e-2;
    double lr_vanilla = 1e-3;
    double lr_gan = 1e-3;
    std::uint64_t seed = 0;

    void validate() const;
};

// One reconstruction pass with frozen noise, keeping every tape the backward
// passes need.
struct VaeForward {
    ForwardTape enc_tape, dec_tape;
    GaussianLatent latent;
    Matrix noise;
    Matrix z;
    Matrix recon;
};
VaeForward vae_reconstruct(const VaeModel& m, const Matrix& enc_input, const Matrix* dec_cond,
                           const Matrix& noise);

// Training step for an unconditional VAE on `target`:
// loss = lambda * BCE(target, recon) + KL + gamma * NegDICE(target, recon).
// Covers the plain VAE (lambda = 1, gamma = 0) and the standalone mask VAE.
double plain_vae_step(VaeModel& m, VaeOptimizer& opt, const Matrix& target, double lambda,
                      double gamma, double lr, Rng& rng);

struct BvaeStepLosses {
    double total = 0.0;
    double mask_part = 0.0;
    double ratio_part = 0.0;
};

struct BvaeForward {
    VaeForward mask_f, ratio_f;
    Matrix x_tilde;  // soft mask (.) ratio reconstruction
    BvaeStepLosses losses;
    std::size_t degenerate_dice_rows = 0;
};
BvaeForward bvae_forward(const BvaeModel& m, const Matrix& x, const Matrix& mask,
                         const Matrix& noise_mask, const Matrix& noise_ratio);

struct BvaeGradients {
    Gradients mask_enc, mask_dec, ratio_enc, ratio_dec;
};
BvaeGradients bvae_backward(const BvaeModel& m, const Matrix& x, const Matrix& mask,
                            const BvaeForward& f);

// Joint step: one combined backward pass, then one Adam update per sub-model
// with its own learning rate.
BvaeStepLosses bvae_train_step(BvaeModel& m, BvaeOptimizer& opt, const Matrix& x,
                               const Matrix& mask, double lr_mask, double lr_ratio, Rng& rng);

// Soft mask reconstruction with no gradient bookkeeping (the frozen phase-2
// condition of the separately trained pair).
Matrix mask_soft_reconstruction(const VaeModel& mask_vae, const Matrix& mask,
                                const Matrix& noise);

// Phase-2 step of the separately trained pair: the ratio VAE learns against
// a precomputed, frozen mask reconstruction. By construction the loss does
// not depend on the mask parameters, so no gradient can cross.
double unbinded_ratio_step(BvaeModel& m, VaeOptimizer& ratio_opt, const Matrix& x,
                           const Matrix& m_tilde_frozen, double lr, Rng& rng);

// Frozen-noise evaluation of the phase-2 loss, for gradient probes.
double unbinded_ratio_loss(const BvaeModel& m, const Matrix& x, const Matrix& m_tilde_frozen,
                           const Matrix& noise_ratio);

struct GanStepLosses {
    double d_loss = 0.0;
    double g_loss = 0.0;
};

// Alternating non-saturating update: discriminator BCE on real-vs-fake, then
// generator BCE against the real label through the frozen discriminator.
GanStepLosses gan_train_step(GanModel& m, GanOptimizer& opt, const Matrix& x, double lr,
                             Rng& rng);

// Largest double t <= x with t == floor(t * 1e4) / 1e4 exactly.
double truncate4(double x);
void truncate4_inplace(Matrix& m);

Matrix generate_vanilla(const VaeModel& m, std::size_t count, Rng& rng);

struct BvaeGeneration {
    Matrix compounds;
    Matrix masks;  // binary masks the compounds were gated with
};
// Decodes a mask from N(0,I)^latent, binarizes it (threshold 0.5, or a
// Bernoulli draw per probability when requested), then decodes ratios
// conditioned on the binary mask. compounds = mask (.) ratios, truncated.
BvaeGeneration generate_bvae(const BvaeModel& m, std::size_t count, Rng& rng,
                             bool bernoulli_mask = false);

// Generator output clamped to [0, 1] (the linear head can go negative),
// then truncated.
Matrix generate_gan(const GanModel& m, std::size_t count, Rng& rng);

}  // namespace bvae
