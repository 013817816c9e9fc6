#include <doctest.h>

#include <cmath>

#include "bvae/network.hpp"
#include "test_util.hpp"

using namespace bvae;
using testing::random_matrix;

namespace {

NetworkParams manual_params(const NetworkSpec& spec, const std::vector<Matrix>& weights,
                            const std::vector<std::vector<double>>& biases) {
    NetworkParams p{weights, biases};
    check_params(spec, p, "manual_params");
    return p;
}

}  // namespace

TEST_CASE("identity linear layer passes the input through") {
    NetworkSpec spec{2, {{2, Activation::linear}}};
    const NetworkParams p =
        manual_params(spec, {Matrix(2, 2, {1, 0, 0, 1})}, {{0.0, 0.0}});
    const Matrix out = mlp_forward(spec, p, Matrix(1, 2, {1.0, 2.0}));
    CHECK(out(0, 0) == 1.0);
    CHECK(out(0, 1) == 2.0);
}

TEST_CASE("zeroed sigmoid layer outputs one half") {
    NetworkSpec spec{3, {{4, Activation::sigmoid}}};
    const NetworkParams p = manual_params(spec, {Matrix(4, 3)}, {{0, 0, 0, 0}});
    Rng rng(5);
    const Matrix out = mlp_forward(spec, p, random_matrix(2, 3, rng));
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == 0.5);
}

TEST_CASE("two-layer relu/linear network matches hand evaluation") {
    // x = (1, -1): pre1 = (0.5, -1.75), relu = (0.5, 0), out = 2*0.5 + 0.125
    NetworkSpec spec{2, {{2, Activation::relu}, {1, Activation::linear}}};
    const NetworkParams p = manual_params(
        spec, {Matrix(2, 2, {1.0, 2.0, -1.0, 0.5}), Matrix(1, 2, {2.0, -1.0})},
        {{1.5, -0.25}, {0.125}});
    const Matrix out = mlp_forward(spec, p, Matrix(1, 2, {1.0, -1.0}));
    CHECK(out(0, 0) == doctest::Approx(1.125).epsilon(1e-14));
}

TEST_CASE("forward is deterministic") {
    Rng rng(6);
    NetworkSpec spec{4, {{8, Activation::relu}, {3, Activation::sigmoid}}};
    const NetworkParams p = init_params(spec, rng);
    const Matrix batch = random_matrix(5, 4, rng);
    const Matrix a = mlp_forward(spec, p, batch);
    const Matrix b = mlp_forward(spec, p, batch);
    CHECK(a == b);
}

TEST_CASE("forward rejects shape mismatches with the layer named") {
    Rng rng(7);
    NetworkSpec spec{4, {{8, Activation::relu}}};
    const NetworkParams p = init_params(spec, rng);
    CHECK_THROWS_WITH_AS(mlp_forward(spec, p, Matrix(2, 3)),
                         doctest::Contains("layer 0"), std::invalid_argument);

    NetworkParams bad = p;
    bad.weights[0] = Matrix(8, 5);
    CHECK_THROWS_WITH_AS(mlp_forward(spec, bad, Matrix(2, 4)), doctest::Contains("layer 0"),
                         std::invalid_argument);
}

TEST_CASE("linear layer gradient of a summed output is the batch column sums") {
    // Y = X W^T, L = sum(Y): dW[o][i] = sum_rows X[:,i], db[o] = n
    NetworkSpec spec{2, {{2, Activation::linear}}};
    Rng rng(8);
    NetworkParams p = init_params(spec, rng);
    const Matrix x(2, 2, {1.0, 2.0, 3.0, 4.0});
    ForwardTape tape;
    mlp_forward(spec, p, x, &tape);
    const Matrix ones(2, 2, {1, 1, 1, 1});
    Matrix dx;
    const Gradients g = mlp_backward(spec, p, tape, ones, &dx);
    for (std::size_t o = 0; o < 2; ++o) {
        CHECK(g.weights[0](o, 0) == 4.0);
        CHECK(g.weights[0](o, 1) == 6.0);
        CHECK(g.biases[0][o] == 2.0);
    }
    // dX = dY W: row-independent
    for (std::size_t r = 0; r < 2; ++r) {
        CHECK(dx(r, 0) == doctest::Approx(p.weights[0](0, 0) + p.weights[0](1, 0)));
        CHECK(dx(r, 1) == doctest::Approx(p.weights[0](0, 1) + p.weights[0](1, 1)));
    }
}

TEST_CASE("zero output gradient yields zero parameter and input gradients") {
    Rng rng(9);
    NetworkSpec spec{3, {{5, Activation::leaky_relu}, {2, Activation::sigmoid}}};
    NetworkParams p = init_params(spec, rng);
    ForwardTape tape;
    mlp_forward(spec, p, random_matrix(4, 3, rng), &tape);
    Matrix dx;
    const Gradients g = mlp_backward(spec, p, tape, Matrix(4, 2), &dx);
    for (const auto& w : g.weights)
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.data()[i] == 0.0);
    for (const auto& b : g.biases)
        for (double v : b) CHECK(v == 0.0);
    for (std::size_t i = 0; i < dx.size(); ++i) CHECK(dx.data()[i] == 0.0);
}

TEST_CASE("backward matches central finite differences on a mixed network") {
    Rng rng(10);
    NetworkSpec spec{5,
                     {{7, Activation::relu},
                      {6, Activation::leaky_relu, 0.2},
                      {4, Activation::sigmoid},
                      {3, Activation::linear}}};
    NetworkParams p = init_params(spec, rng);
    const Matrix batch = random_matrix(3, 5, rng);
    const Matrix weights_c = random_matrix(3, 3, rng);  // scalarizer

    auto loss = [&]() {
        const Matrix y = mlp_forward(spec, p, batch);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += weights_c.data()[i] * y.data()[i];
        return s;
    };

    ForwardTape tape;
    mlp_forward(spec, p, batch, &tape);
    Matrix dx;
    const Gradients g = mlp_backward(spec, p, tape, weights_c, &dx);
    CHECK(testing::max_param_grad_err(p, g, loss) <= 1e-4);

    // Input gradient against finite differences too.
    Matrix batch_copy = batch;
    auto loss_x = [&]() {
        const Matrix y = mlp_forward(spec, p, batch_copy);
        double s = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) s += weights_c.data()[i] * y.data()[i];
        return s;
    };
    double worst = 0.0;
    for (std::size_t i = 0; i < batch_copy.size(); ++i) {
        const double fd = testing::central_diff(batch_copy.data()[i], loss_x);
        worst = std::max(worst, testing::rel_err(fd, dx.data()[i]));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("backward rejects a mismatched output gradient") {
    Rng rng(11);
    NetworkSpec spec{3, {{2, Activation::linear}}};
    NetworkParams p = init_params(spec, rng);
    ForwardTape tape;
    mlp_forward(spec, p, Matrix(4, 3), &tape);
    CHECK_THROWS_AS(mlp_backward(spec, p, tape, Matrix(4, 3)), std::invalid_argument);
}

TEST_CASE("init_params spans the expected fan-based range") {
    Rng rng(12);
    NetworkSpec spec{100, {{50, Activation::relu}}};
    const NetworkParams p = init_params(spec, rng);
    const double bound = std::sqrt(6.0 / 150.0);
    double max_seen = 0.0;
    for (std::size_t i = 0; i < p.weights[0].size(); ++i) {
        CHECK(std::abs(p.weights[0].data()[i]) <= bound);
        max_seen = std::max(max_seen, std::abs(p.weights[0].data()[i]));
    }
    CHECK(max_seen > 0.5 * bound);
    for (double b : p.biases[0]) CHECK(b == 0.0);
}

TEST_CASE("reparameterize identities") {
    GaussianLatent latent{Matrix(1, 2, {0.3, -0.7}), Matrix(1, 2, {0.5, 1.5})};
    const Matrix zero_noise(1, 2);
    CHECK(reparameterize(latent, zero_noise) == latent.mu);

    GaussianLatent unit{Matrix(1, 2), Matrix(1, 2)};
    const Matrix z = reparameterize(unit, Matrix(1, 2, {1.0, -1.0}));
    CHECK(z(0, 0) == 1.0);
    CHECK(z(0, 1) == -1.0);

    GaussianLatent scaled{Matrix(1, 1, {2.0}), Matrix(1, 1, {std::log(4.0)})};
    const Matrix z2 = reparameterize(scaled, Matrix(1, 1, {0.5}));
    CHECK(z2(0, 0) == doctest::Approx(3.0).epsilon(1e-14));

    CHECK_THROWS_AS(reparameterize(latent, Matrix(1, 3)), std::invalid_argument);
}

TEST_CASE("split_latent halves the encoder output") {
    const Matrix enc(2, 4, {1, 2, 3, 4, 5, 6, 7, 8});
    const GaussianLatent l = split_latent(enc);
    CHECK(l.mu == Matrix(2, 2, {1, 2, 5, 6}));
    CHECK(l.log_var == Matrix(2, 2, {3, 4, 7, 8}));
    CHECK_THROWS_AS(split_latent(Matrix(2, 3)), std::invalid_argument);
}
