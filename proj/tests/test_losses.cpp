#include <doctest.h>

#include <cmath>

#include "bvae/losses.hpp"
#include "test_util.hpp"

using namespace bvae;
using testing::random_matrix;

namespace {

Matrix clamp01(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::clamp(out.data()[i], kSigmoidClamp, 1.0 - kSigmoidClamp);
    return out;
}

}  // namespace

TEST_CASE("bce is near zero at a perfect clamped reconstruction") {
    const Matrix target(2, 6, {1, 0, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1});
    const double v = bce(target, clamp01(target));
    CHECK(v >= 0.0);
    CHECK(v <= 1e-5);
}

TEST_CASE("bce hand values") {
    CHECK(bce(Matrix(1, 1, {1.0}), Matrix(1, 1, {0.5})) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(bce(Matrix(1, 1, {0.5}), Matrix(1, 1, {0.5})) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bce(Matrix(1, 2), Matrix(1, 3)), std::invalid_argument);
    CHECK_THROWS_AS(bce(Matrix(1, 1, {0.5}), Matrix(1, 1, {1.0})), std::invalid_argument);
}

TEST_CASE("bce is minimized at prediction = target") {
    Rng rng(3);
    const Matrix t = random_matrix(2, 4, rng, 0.0, 1.0);
    const Matrix p0 = clamp01(t);
    const double base = bce(t, p0);
    for (double delta : {0.05, -0.05, 0.2}) {
        Matrix p = p0;
        for (std::size_t i = 0; i < p.size(); ++i)
            p.data()[i] = std::clamp(p.data()[i] + delta, kSigmoidClamp, 1.0 - kSigmoidClamp);
        CHECK(bce(t, p) >= base - 1e-12);
    }
}

TEST_CASE("gaussian_kl closed-form values") {
    CHECK(gaussian_kl({Matrix(1, 1), Matrix(1, 1)}) == 0.0);
    CHECK(gaussian_kl({Matrix(1, 1, {1.0}), Matrix(1, 1)}) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gaussian_kl({Matrix(1, 1), Matrix(1, 1, {1.0})}) ==
          doctest::Approx(0.5 * (std::exp(1.0) - 2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian_kl({Matrix(1, 1, {1.0}), Matrix(1, 1, {std::nan("")})}),
                    std::invalid_argument);
}

TEST_CASE("gaussian_kl is non-negative and zero only at the prior") {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const GaussianLatent l{random_matrix(3, 5, rng, -2, 2), random_matrix(3, 5, rng, -2, 2)};
        CHECK(gaussian_kl(l) >= 0.0);
    }
    CHECK(gaussian_kl({Matrix(4, 6), Matrix(4, 6)}) == 0.0);
}

TEST_CASE("neg_dice identities are exact") {
    const Matrix ones_mask(1, 4, {1, 1, 0, 1});
    CHECK(neg_dice(ones_mask, ones_mask) == -1.0);
    CHECK(neg_dice(Matrix(1, 2, {1, 0}), Matrix(1, 2, {0, 1})) == 0.0);
    CHECK(neg_dice(Matrix(1, 4, {1, 1, 0, 0}), Matrix(1, 4, {1, 0, 1, 0})) == -0.5);
}

TEST_CASE("neg_dice handles all-zero rows as vacuous with a warning count") {
    const Matrix a(2, 3, {0, 0, 0, 1, 0, 0});
    const Matrix b(2, 3, {0, 0, 0, 1, 0, 0});
    std::size_t degenerate = 0;
    const double v = neg_dice(a, b, &degenerate);
    CHECK(degenerate == 1);
    CHECK(v == doctest::Approx(-0.5));  // (0 + -1) / 2
}

TEST_CASE("neg_dice is bounded in [-1, 0] and symmetric") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Matrix a = random_matrix(2, 7, rng, 0.0, 1.0);
        const Matrix b = random_matrix(2, 7, rng, 0.0, 1.0);
        const double v = neg_dice(a, b);
        CHECK(v <= 0.0);
        CHECK(v >= -1.0);
        CHECK(neg_dice(b, a) == v);
    }
}

TEST_CASE("loss gradients match central finite differences") {
    Rng rng(6);
    const Matrix t = random_matrix(3, 5, rng, 0.0, 1.0);
    Matrix p = random_matrix(3, 5, rng, 0.05, 0.95);

    SUBCASE("bce") {
        Matrix grad(3, 5);
        bce_backward(t, p, 1.0, grad);
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double fd =
                testing::central_diff(p.data()[i], [&]() { return bce(t, p); });
            worst = std::max(worst, testing::rel_err(fd, grad.data()[i]));
        }
        CHECK(worst <= 1e-4);
    }

    SUBCASE("gaussian_kl") {
        GaussianLatent l{random_matrix(3, 4, rng, -1, 1), random_matrix(3, 4, rng, -1, 1)};
        Matrix dmu(3, 4), dlv(3, 4);
        gaussian_kl_backward(l, 1.0, dmu, dlv);
        double worst = 0.0;
        for (std::size_t i = 0; i < l.mu.size(); ++i) {
            const double fd_mu =
                testing::central_diff(l.mu.data()[i], [&]() { return gaussian_kl(l); });
            const double fd_lv =
                testing::central_diff(l.log_var.data()[i], [&]() { return gaussian_kl(l); });
            worst = std::max(worst, testing::rel_err(fd_mu, dmu.data()[i]));
            worst = std::max(worst, testing::rel_err(fd_lv, dlv.data()[i]));
        }
        CHECK(worst <= 1e-4);
    }

    SUBCASE("neg_dice") {
        const Matrix a = random_matrix(3, 5, rng, 0.0, 1.0);
        Matrix grad(3, 5);
        neg_dice_backward(a, p, 1.0, grad);
        double worst = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double fd =
                testing::central_diff(p.data()[i], [&]() { return neg_dice(a, p); });
            worst = std::max(worst, testing::rel_err(fd, grad.data()[i]));
        }
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("ratio loss composes bce and kl with the published weighting") {
    LossWeights w;
    CHECK(w.lambda_r == 10.0);  // selected values are the defaults
    CHECK(w.lambda_m == 1.0);
    CHECK(w.gamma == 5.0);
    CHECK(w.beta == 10.0);

    Rng rng(7);
    const Matrix x = random_matrix(2, 6, rng, 0.0, 1.0);
    const Matrix xt = random_matrix(2, 6, rng, 0.1, 0.9);
    const GaussianLatent l{random_matrix(2, 3, rng, -1, 1), random_matrix(2, 3, rng, -1, 1)};
    CHECK(ratio_vae_loss(x, xt, l, w) == 10.0 * bce(x, xt) + gaussian_kl(l));

    // Near-perfect reconstruction at the prior is near zero.
    const GaussianLatent prior{Matrix(2, 6), Matrix(2, 6)};
    const Matrix xb(2, 6, {1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0});
    CHECK(ratio_vae_loss(xb, clamp01(xb), prior, w) <= 1e-4);

    // Single-feature hand case: ln 2 + 0.5.
    LossWeights w1 = w;
    w1.lambda_r = 1.0;
    CHECK(ratio_vae_loss(Matrix(1, 1, {1.0}), Matrix(1, 1, {0.5}),
                         {Matrix(1, 1, {1.0}), Matrix(1, 1)}, w1) ==
          doctest::Approx(std::log(2.0) + 0.5).epsilon(1e-12));
}

TEST_CASE("mask loss composes bce, kl and the dice term") {
    LossWeights w;
    const Matrix m(1, 4, {1, 0, 1, 1});
    const Matrix mt = clamp01(m);
    const GaussianLatent prior{Matrix(1, 2), Matrix(1, 2)};
    CHECK(mask_vae_loss(m, mt, prior, w) == doctest::Approx(-5.0).epsilon(1e-4));

    // gamma = 0 reduces exactly to the plain VAE objective.
    LossWeights w0 = w;
    w0.gamma = 0.0;
    Rng rng(8);
    const Matrix soft = random_matrix(1, 4, rng, 0.1, 0.9);
    const GaussianLatent l{random_matrix(1, 2, rng, -1, 1), random_matrix(1, 2, rng, -1, 1)};
    CHECK(mask_vae_loss(m, soft, l, w0) == w.lambda_m * bce(m, soft) + gaussian_kl(l));
}

TEST_CASE("combined loss is linear with coefficients (beta, 1)") {
    LossWeights w;
    CHECK(bvae_loss(-5.0, 1.2, w) == doctest::Approx(-48.8).epsilon(1e-12));
    w.beta = 0.0;
    CHECK(bvae_loss(-5.0, 1.2, w) == 1.2);
    w.beta = 3.0;
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        const double a = rng.uniform(), b = rng.uniform();
        CHECK(bvae_loss(a, b, w) == 3.0 * a + b);
    }
    CHECK_THROWS_AS(bvae_loss(std::nan(""), 0.0, w), std::invalid_argument);
}

TEST_CASE("loss weights reject negatives") {
    LossWeights w;
    w.gamma = -1.0;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
}
