#include "bvae/models.hpp"

#include <cmath>

namespace bvae {

namespace {

NetworkSpec vae_encoder_spec(std::size_t in, std::size_t latent,
                             const std::vector<std::size_t>& hidden) {
    NetworkSpec s;
    s.input_dim = in;
    for (std::size_t h : hidden) s.layers.push_back({h, Activation::relu});
    s.layers.push_back({2 * latent, Activation::linear});
    return s;
}

NetworkSpec vae_decoder_spec(std::size_t in, std::size_t out,
                             const std::vector<std::size_t>& hidden) {
    NetworkSpec s;
    s.input_dim = in;
    for (std::size_t h : hidden) s.layers.push_back({h, Activation::relu});
    s.layers.push_back({out, Activation::sigmoid});
    return s;
}

VaeModel make_vae(std::size_t p, std::size_t latent, std::size_t cond,
                  const std::vector<std::size_t>& hidden, Rng& rng) {
    VaeModel m;
    m.latent_dim = latent;
    m.cond_dim = cond;
    m.enc_spec = vae_encoder_spec(p + cond, latent, hidden);
    m.dec_spec = vae_decoder_spec(latent + cond, p, hidden);
    m.enc = init_params(m.enc_spec, rng);
    m.dec = init_params(m.dec_spec, rng);
    return m;
}

Matrix elementwise_mul(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "elementwise_mul");
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    return out;
}

Matrix normal_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    rng.fill_normal(m.data(), m.size());
    return m;
}

constexpr std::size_t kGenerateChunk = 1024;

}  // namespace

VaeModel make_vanilla_vae(std::size_t p, Rng& rng) {
    return make_vae(p, 128, 0, {512, 1024, 256}, rng);
}

VaeModel make_mask_vae(std::size_t p, Rng& rng) {
    return make_vae(p, 64, 0, {512, 1024, 256}, rng);
}

VaeModel make_ratio_vae(std::size_t p, Rng& rng) {
    return make_vae(p, 32, p, {256, 256}, rng);
}

VaeOptimizer make_vae_optimizer(const VaeModel& m) {
    return {make_adam_state(m.enc_spec), make_adam_state(m.dec_spec)};
}

BvaeModel make_bvae(std::size_t p, const LossWeights& w, Rng& rng) {
    w.validate();
    BvaeModel m;
    m.mask = make_mask_vae(p, rng);
    m.ratio = make_ratio_vae(p, rng);
    m.weights = w;
    return m;
}

BvaeOptimizer make_bvae_optimizer(const BvaeModel& m) {
    return {make_vae_optimizer(m.mask), make_vae_optimizer(m.ratio)};
}

GanModel make_gan(std::size_t p, Rng& rng) {
    GanModel m;
    m.noise_dim = 1024;
    m.gen_spec.input_dim = m.noise_dim;
    for (std::size_t h : {512, 1024, 256})
        m.gen_spec.layers.push_back({h, Activation::leaky_relu, 0.2});
    m.gen_spec.layers.push_back({p, Activation::linear});
    m.disc_spec.input_dim = p;
    for (std::size_t h : {512, 1024, 256})
        m.disc_spec.layers.push_back({h, Activation::leaky_relu, 0.2});
    m.disc_spec.layers.push_back({1, Activation::sigmoid});
    m.gen = init_params(m.gen_spec, rng);
    m.disc = init_params(m.disc_spec, rng);
    return m;
}

GanOptimizer make_gan_optimizer(const GanModel& m) {
    return {make_adam_state(m.gen_spec), make_adam_state(m.disc_spec)};
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    for (double lr : {lr_mask, lr_ratio, lr_vanilla, lr_gan})
        if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: learning rates must be > 0");
}

VaeForward vae_reconstruct(const VaeModel& m, const Matrix& enc_input, const Matrix* dec_cond,
                           const Matrix& noise) {
    VaeForward f;
    Matrix enc_out = mlp_forward(m.enc_spec, m.enc, enc_input, &f.enc_tape);
    f.latent = split_latent(enc_out);
    f.noise = noise;
    f.z = reparameterize(f.latent, noise);
    const Matrix dec_in = dec_cond ? hcat(f.z, *dec_cond) : f.z;
    f.recon = mlp_forward(m.dec_spec, m.dec, dec_in, &f.dec_tape);
    return f;
}

double plain_vae_step(VaeModel& m, VaeOptimizer& opt, const Matrix& target, double lambda,
                      double gamma, double lr, Rng& rng) {
    const Matrix noise = normal_matrix(target.rows(), m.latent_dim, rng);
    VaeForward f = vae_reconstruct(m, target, nullptr, noise);

    double loss = lambda * bce(target, f.recon) + gaussian_kl(f.latent);
    if (gamma != 0.0) loss += gamma * neg_dice(target, f.recon);
    if (!std::isfinite(loss)) throw std::runtime_error("plain_vae_step: non-finite loss");

    Matrix drecon(target.rows(), target.cols());
    bce_backward(target, f.recon, lambda, drecon);
    if (gamma != 0.0) neg_dice_backward(target, f.recon, gamma, drecon);

    Matrix dz;
    Gradients g_dec = mlp_backward(m.dec_spec, m.dec, f.dec_tape, drecon, &dz);
    Matrix dmu(dz.rows(), dz.cols()), dlv(dz.rows(), dz.cols());
    reparameterize_backward(f.latent, f.noise, dz, dmu, dlv);
    gaussian_kl_backward(f.latent, 1.0, dmu, dlv);
    Gradients g_enc = mlp_backward(m.enc_spec, m.enc, f.enc_tape, hcat(dmu, dlv));

    adam_step(m.enc, g_enc, opt.enc, lr);
    adam_step(m.dec, g_dec, opt.dec, lr);
    return loss;
}

BvaeForward bvae_forward(const BvaeModel& m, const Matrix& x, const Matrix& mask,
                         const Matrix& noise_mask, const Matrix& noise_ratio) {
    require_same_shape(x, mask, "bvae_forward");
    BvaeForward f;
    f.mask_f = vae_reconstruct(m.mask, mask, nullptr, noise_mask);
    const Matrix& m_tilde = f.mask_f.recon;

    f.ratio_f = vae_reconstruct(m.ratio, hcat(x, m_tilde), &m_tilde, noise_ratio);
    f.x_tilde = elementwise_mul(m_tilde, f.ratio_f.recon);

    f.losses.ratio_part = m.weights.lambda_r * bce(x, f.x_tilde) + gaussian_kl(f.ratio_f.latent);
    f.losses.mask_part = m.weights.lambda_m * bce(mask, m_tilde) +
                         gaussian_kl(f.mask_f.latent) +
                         m.weights.gamma * neg_dice(mask, m_tilde, &f.degenerate_dice_rows);
    f.losses.total = bvae_loss(f.losses.mask_part, f.losses.ratio_part, m.weights);
    return f;
}

BvaeGradients bvae_backward(const BvaeModel& m, const Matrix& x, const Matrix& mask,
                            const BvaeForward& f) {
    const std::size_t n = x.rows(), p = x.cols();
    const Matrix& m_tilde = f.mask_f.recon;
    const Matrix& r_tilde = f.ratio_f.recon;
    const LossWeights& w = m.weights;

    // Ratio reconstruction term: d/dX~ of lambda_r * BCE(X, X~), then split
    // through X~ = M~ (.) R~.
    Matrix dx_tilde(n, p);
    bce_backward(x, f.x_tilde, w.lambda_r, dx_tilde);
    Matrix dr_tilde = elementwise_mul(dx_tilde, m_tilde);
    Matrix dm_tilde = elementwise_mul(dx_tilde, r_tilde);

    BvaeGradients g;

    // Ratio decoder; its input was (z || M~), so the tail of the input
    // gradient is another path into the soft mask.
    Matrix d_dec_in;
    g.ratio_dec = mlp_backward(m.ratio.dec_spec, m.ratio.dec, f.ratio_f.dec_tape, dr_tilde,
                               &d_dec_in);
    const std::size_t latent_r = m.ratio.latent_dim;
    Matrix dz_r = col_slice(d_dec_in, 0, latent_r);
    {
        const Matrix tail = col_slice(d_dec_in, latent_r, latent_r + p);
        for (std::size_t i = 0; i < dm_tilde.size(); ++i)
            dm_tilde.data()[i] += tail.data()[i];
    }

    Matrix dmu_r(n, latent_r), dlv_r(n, latent_r);
    reparameterize_backward(f.ratio_f.latent, f.ratio_f.noise, dz_r, dmu_r, dlv_r);
    gaussian_kl_backward(f.ratio_f.latent, 1.0, dmu_r, dlv_r);

    // Ratio encoder; its input was (X || M~), third path into the soft mask.
    Matrix d_enc_in;
    g.ratio_enc = mlp_backward(m.ratio.enc_spec, m.ratio.enc, f.ratio_f.enc_tape,
                               hcat(dmu_r, dlv_r), &d_enc_in);
    {
        const Matrix tail = col_slice(d_enc_in, p, 2 * p);
        for (std::size_t i = 0; i < dm_tilde.size(); ++i)
            dm_tilde.data()[i] += tail.data()[i];
    }

    // Mask-side losses, scaled by beta as in the combined objective.
    bce_backward(mask, m_tilde, w.beta * w.lambda_m, dm_tilde);
    neg_dice_backward(mask, m_tilde, w.beta * w.gamma, dm_tilde);

    Matrix dz_m;
    g.mask_dec = mlp_backward(m.mask.dec_spec, m.mask.dec, f.mask_f.dec_tape, dm_tilde, &dz_m);
    const std::size_t latent_m = m.mask.latent_dim;
    Matrix dmu_m(n, latent_m), dlv_m(n, latent_m);
    reparameterize_backward(f.mask_f.latent, f.mask_f.noise, dz_m, dmu_m, dlv_m);
    gaussian_kl_backward(f.mask_f.latent, w.beta, dmu_m, dlv_m);
    g.mask_enc = mlp_backward(m.mask.enc_spec, m.mask.enc, f.mask_f.enc_tape,
                              hcat(dmu_m, dlv_m));
    return g;
}

BvaeStepLosses bvae_train_step(BvaeModel& m, BvaeOptimizer& opt, const Matrix& x,
                               const Matrix& mask, double lr_mask, double lr_ratio, Rng& rng) {
    const Matrix noise_mask = normal_matrix(x.rows(), m.mask.latent_dim, rng);
    const Matrix noise_ratio = normal_matrix(x.rows(), m.ratio.latent_dim, rng);
    BvaeForward f = bvae_forward(m, x, mask, noise_mask, noise_ratio);
    if (!std::isfinite(f.losses.total))
        throw std::runtime_error("bvae_train_step: non-finite loss");
    BvaeGradients g = bvae_backward(m, x, mask, f);
    adam_step(m.mask.enc, g.mask_enc, opt.mask.enc, lr_mask);
    adam_step(m.mask.dec, g.mask_dec, opt.mask.dec, lr_mask);
    adam_step(m.ratio.enc, g.ratio_enc, opt.ratio.enc, lr_ratio);
    adam_step(m.ratio.dec, g.ratio_dec, opt.ratio.dec, lr_ratio);
    return f.losses;
}

Matrix mask_soft_reconstruction(const VaeModel& mask_vae, const Matrix& mask,
                                const Matrix& noise) {
    VaeForward f = vae_reconstruct(mask_vae, mask, nullptr, noise);
    return f.recon;
}

double unbinded_ratio_step(BvaeModel& m, VaeOptimizer& ratio_opt, const Matrix& x,
                           const Matrix& m_tilde_frozen, double lr, Rng& rng) {
    const Matrix noise = normal_matrix(x.rows(), m.ratio.latent_dim, rng);
    VaeForward f = vae_reconstruct(m.ratio, hcat(x, m_tilde_frozen), &m_tilde_frozen, noise);
    const Matrix x_tilde = elementwise_mul(m_tilde_frozen, f.recon);

    const double loss =
        m.weights.lambda_r * bce(x, x_tilde) + gaussian_kl(f.latent);
    if (!std::isfinite(loss)) throw std::runtime_error("unbinded_ratio_step: non-finite loss");

    Matrix dx_tilde(x.rows(), x.cols());
    bce_backward(x, x_tilde, m.weights.lambda_r, dx_tilde);
    const Matrix dr_tilde = elementwise_mul(dx_tilde, m_tilde_frozen);

    Matrix d_dec_in;
    Gradients g_dec =
        mlp_backward(m.ratio.dec_spec, m.ratio.dec, f.dec_tape, dr_tilde, &d_dec_in);
    Matrix dz = col_slice(d_dec_in, 0, m.ratio.latent_dim);
    Matrix dmu(dz.rows(), dz.cols()), dlv(dz.rows(), dz.cols());
    reparameterize_backward(f.latent, f.noise, dz, dmu, dlv);
    gaussian_kl_backward(f.latent, 1.0, dmu, dlv);
    Gradients g_enc = mlp_backward(m.ratio.enc_spec, m.ratio.enc, f.enc_tape, hcat(dmu, dlv));

    adam_step(m.ratio.enc, g_enc, ratio_opt.enc, lr);
    adam_step(m.ratio.dec, g_dec, ratio_opt.dec, lr);
    return loss;
}

double unbinded_ratio_loss(const BvaeModel& m, const Matrix& x, const Matrix& m_tilde_frozen,
                           const Matrix& noise_ratio) {
    VaeForward f =
        vae_reconstruct(m.ratio, hcat(x, m_tilde_frozen), &m_tilde_frozen, noise_ratio);
    const Matrix x_tilde = elementwise_mul(m_tilde_frozen, f.recon);
    return m.weights.lambda_r * bce(x, x_tilde) + gaussian_kl(f.latent);
}

GanStepLosses gan_train_step(GanModel& m, GanOptimizer& opt, const Matrix& x, double lr,
                             Rng& rng) {
    const std::size_t n = x.rows();
    const Matrix ones(n, 1, 1.0);
    const Matrix zeros(n, 1, 0.0);
    GanStepLosses losses;

    // Discriminator: real rows toward 1, a detached fake batch toward 0.
    {
        const Matrix fake =
            mlp_forward(m.gen_spec, m.gen, normal_matrix(n, m.noise_dim, rng));
        ForwardTape tape_real, tape_fake;
        const Matrix d_real = mlp_forward(m.disc_spec, m.disc, x, &tape_real);
        const Matrix d_fake = mlp_forward(m.disc_spec, m.disc, fake, &tape_fake);
        losses.d_loss = bce(ones, d_real) + bce(zeros, d_fake);
        if (!std::isfinite(losses.d_loss))
            throw std::runtime_error("gan_train_step: non-finite discriminator loss");

        Matrix dd_real(n, 1), dd_fake(n, 1);
        bce_backward(ones, d_real, 1.0, dd_real);
        bce_backward(zeros, d_fake, 1.0, dd_fake);
        Gradients g_disc = mlp_backward(m.disc_spec, m.disc, tape_real, dd_real);
        accumulate(g_disc, mlp_backward(m.disc_spec, m.disc, tape_fake, dd_fake));
        adam_step(m.disc, g_disc, opt.disc, lr);
    }

    // Generator: non-saturating, push fresh fakes toward the real label.
    {
        ForwardTape tape_gen, tape_disc;
        const Matrix fake =
            mlp_forward(m.gen_spec, m.gen, normal_matrix(n, m.noise_dim, rng), &tape_gen);
        const Matrix d_gen = mlp_forward(m.disc_spec, m.disc, fake, &tape_disc);
        losses.g_loss = bce(ones, d_gen);
        if (!std::isfinite(losses.g_loss))
            throw std::runtime_error("gan_train_step: non-finite generator loss");

        Matrix dd(n, 1);
        bce_backward(ones, d_gen, 1.0, dd);
        Matrix dfake;
        mlp_backward(m.disc_spec, m.disc, tape_disc, dd, &dfake);
        Gradients g_gen = mlp_backward(m.gen_spec, m.gen, tape_gen, dfake);
        adam_step(m.gen, g_gen, opt.gen, lr);
    }
    return losses;
}

double truncate4(double x) {
    // floor(k)/1e4 is not always a fixed point of itself in binary doubles;
    // iterate so the result satisfies t == floor(t * 1e4) / 1e4 exactly.
    double t = std::floor(x * 10000.0) / 10000.0;
    for (;;) {
        const double t2 = std::floor(t * 10000.0) / 10000.0;
        if (t2 == t) return t;
        t = t2;
    }
}

void truncate4_inplace(Matrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = truncate4(m.data()[i]);
}

Matrix generate_vanilla(const VaeModel& m, std::size_t count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("generate_vanilla: count must be >= 1");
    const std::size_t p = m.dec_spec.output_dim();
    Matrix out(count, p);
    for (std::size_t start = 0; start < count; start += kGenerateChunk) {
        const std::size_t n = std::min(kGenerateChunk, count - start);
        const Matrix z = normal_matrix(n, m.latent_dim, rng);
        const Matrix decoded = mlp_forward(m.dec_spec, m.dec, z);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) out(start + i, j) = truncate4(decoded(i, j));
    }
    return out;
}

BvaeGeneration generate_bvae(const BvaeModel& m, std::size_t count, Rng& rng,
                             bool bernoulli_mask) {
    if (count < 1) throw std::invalid_argument("generate_bvae: count must be >= 1");
    const std::size_t p = m.mask.dec_spec.output_dim();
    BvaeGeneration g{Matrix(count, p), Matrix(count, p)};
    for (std::size_t start = 0; start < count; start += kGenerateChunk) {
        const std::size_t n = std::min(kGenerateChunk, count - start);
        const Matrix z_mask = normal_matrix(n, m.mask.latent_dim, rng);
        const Matrix probs = mlp_forward(m.mask.dec_spec, m.mask.dec, z_mask);
        Matrix binary(n, p);
        for (std::size_t i = 0; i < binary.size(); ++i) {
            const double q = probs.data()[i];
            binary.data()[i] = (bernoulli_mask ? rng.uniform() < q : q > 0.5) ? 1.0 : 0.0;
        }
        const Matrix z_ratio = normal_matrix(n, m.ratio.latent_dim, rng);
        const Matrix ratios = mlp_forward(m.ratio.dec_spec, m.ratio.dec, hcat(z_ratio, binary));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) {
                g.compounds(start + i, j) = truncate4(binary(i, j) * ratios(i, j));
                g.masks(start + i, j) = binary(i, j);
            }
    }
    return g;
}

Matrix generate_gan(const GanModel& m, std::size_t count, Rng& rng) {
    if (count < 1) throw std::invalid_argument("generate_gan: count must be >= 1");
    const std::size_t p = m.gen_spec.output_dim();
    Matrix out(count, p);
    for (std::size_t start = 0; start < count; start += kGenerateChunk) {
        const std::size_t n = std::min(kGenerateChunk, count - start);
        const Matrix raw =
            mlp_forward(m.gen_spec, m.gen, normal_matrix(n, m.noise_dim, rng));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j)
                out(start + i, j) = truncate4(std::clamp(raw(i, j), 0.0, 1.0));
    }
    return out;
}

}  // namespace bvae
