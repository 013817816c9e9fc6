#include "bvae/losses.hpp"

#include <cmath>

namespace bvae {

void LossWeights::validate() const {
    for (double v : {lambda_r, lambda_m, gamma, beta})
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("LossWeights: all weights must be finite and >= 0");
}

double bce(const Matrix& target, const Matrix& pred) {
    require_same_shape(target, pred, "bce");
    if (target.rows() == 0) throw std::invalid_argument("bce: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.data()[i];
        const double t = target.data()[i];
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("bce: prediction outside (0, 1); clamp it first");
        total -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return total / static_cast<double>(target.rows());
}

void bce_backward(const Matrix& target, const Matrix& pred, double scale, Matrix& dpred) {
    require_same_shape(target, pred, "bce_backward");
    require_same_shape(pred, dpred, "bce_backward");
    const double inv_n = scale / static_cast<double>(target.rows());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.data()[i];
        const double t = target.data()[i];
        dpred.data()[i] += inv_n * (p - t) / (p * (1.0 - p));
    }
}

double gaussian_kl(const GaussianLatent& latent) {
    require_same_shape(latent.mu, latent.log_var, "gaussian_kl");
    if (latent.mu.rows() == 0) throw std::invalid_argument("gaussian_kl: empty batch");
    if (!latent.log_var.all_finite() || !latent.mu.all_finite())
        throw std::invalid_argument("gaussian_kl: non-finite latent moments");
    double total = 0.0;
    for (std::size_t i = 0; i < latent.mu.size(); ++i) {
        const double mu = latent.mu.data()[i];
        const double lv = latent.log_var.data()[i];
        // mu^2 + e^lv - 1 - lv, with expm1 so the term stays >= 0 near lv = 0
        total += 0.5 * (mu * mu + std::expm1(lv) - lv);
    }
    return total / static_cast<double>(latent.mu.rows());
}

void gaussian_kl_backward(const GaussianLatent& latent, double scale, Matrix& dmu,
                          Matrix& dlog_var) {
    require_same_shape(latent.mu, dmu, "gaussian_kl_backward");
    require_same_shape(latent.mu, dlog_var, "gaussian_kl_backward");
    const double inv_n = scale / static_cast<double>(latent.mu.rows());
    for (std::size_t i = 0; i < latent.mu.size(); ++i) {
        dmu.data()[i] += inv_n * latent.mu.data()[i];
        dlog_var.data()[i] += inv_n * 0.5 * std::expm1(latent.log_var.data()[i]);
    }
}

double neg_dice(const Matrix& a, const Matrix& b, std::size_t* degenerate_rows) {
    require_same_shape(a, b, "neg_dice");
    if (a.rows() == 0) throw std::invalid_argument("neg_dice: empty batch");
    double total = 0.0;
    std::size_t degenerate = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ra = a.row(i);
        const double* rb = b.row(i);
        double dot = 0.0, sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            dot += ra[j] * rb[j];
            sum += ra[j] + rb[j];
        }
        if (sum == 0.0) {
            ++degenerate;  // vacuous overlap, contributes 0
            continue;
        }
        total += -2.0 * dot / sum;
    }
    if (degenerate_rows) *degenerate_rows += degenerate;
    return total / static_cast<double>(a.rows());
}

void neg_dice_backward(const Matrix& a, const Matrix& b, double scale, Matrix& db) {
    require_same_shape(a, b, "neg_dice_backward");
    require_same_shape(b, db, "neg_dice_backward");
    const double inv_n = scale / static_cast<double>(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* ra = a.row(i);
        const double* rb = b.row(i);
        double dot = 0.0, sum = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            dot += ra[j] * rb[j];
            sum += ra[j] + rb[j];
        }
        if (sum == 0.0) continue;
        double* rd = db.row(i);
        const double s2 = sum * sum;
        for (std::size_t j = 0; j < a.cols(); ++j)
            rd[j] += inv_n * (-2.0 * ra[j] / sum + 2.0 * dot / s2);
    }
}

double ratio_vae_loss(const Matrix& x, const Matrix& x_tilde, const GaussianLatent& latent,
                      const LossWeights& w) {
    return w.lambda_r * bce(x, x_tilde) + gaussian_kl(latent);
}

double mask_vae_loss(const Matrix& m, const Matrix& m_tilde, const GaussianLatent& latent,
                     const LossWeights& w) {
    return w.lambda_m * bce(m, m_tilde) + gaussian_kl(latent) + w.gamma * neg_dice(m, m_tilde);
}

double bvae_loss(double mask_loss, double ratio_loss, const LossWeights& w) {
    if (!std::isfinite(mask_loss) || !std::isfinite(ratio_loss))
        throw std::invalid_argument("bvae_loss: non-finite inputs");
    return w.beta * mask_loss + ratio_loss;
}

}  // namespace bvae
