#pragma once

#include "bvae/network.hpp"

namespace bvae {

// Loss mixing weights. Defaults are the selected values: reconstruction
// weights lambda_r = 10 (ratio side) and lambda_m = 1 (mask side), Dice
// weight gamma = 5, mask-loss weight beta = 10 in the combined objective.
struct LossWeights {
    double lambda_r = 10.0;
    double lambda_m = 1.0;
    double gamma = 5.0;
    double beta = 10.0;

    void validate() const;
};

// Binary cross-entropy, summed over features and averaged over batch rows.
// Predictions must already be clamped away from {0, 1}.
double bce(const Matrix& target, const Matrix& pred);

// Accumulates scale * dBCE/dpred into dpred.
void bce_backward(const Matrix& target, const Matrix& pred, double scale, Matrix& dpred);

// KL(N(mu, sigma) || N(0, I)) in closed form, averaged over batch rows.
double gaussian_kl(const GaussianLatent& latent);

void gaussian_kl_backward(const GaussianLatent& latent, double scale, Matrix& dmu,
                          Matrix& dlog_var);

// -2 (a.b) / (|a|_1 + |b|_1) per row, averaged over rows. A row where both
// sides are all-zero contributes 0; such rows are counted into
// *degenerate_rows when given so callers can log a warning.
double neg_dice(const Matrix& a, const Matrix& b, std::size_t* degenerate_rows = nullptr);

// Accumulates scale * dNegDICE/db into db.
void neg_dice_backward(const Matrix& a, const Matrix& b, double scale, Matrix& db);

// lambda_r * BCE(X, X~) + KL
double ratio_vae_loss(const Matrix& x, const Matrix& x_tilde, const GaussianLatent& latent,
                      const LossWeights& w);

// lambda_m * BCE(M, M~) + KL + gamma * NegDICE(M, M~)
double mask_vae_loss(const Matrix& m, const Matrix& m_tilde, const GaussianLatent& latent,
                     const LossWeights& w);

// beta * mask_loss + ratio_loss
double bvae_loss(double mask_loss, double ratio_loss, const LossWeights& w);

}  // namespace bvae
