#include <doctest.h>

#include <cmath>

#include "bvae/adam.hpp"

using namespace bvae;

namespace {

// Scalar parameter as a 1x1 linear "network".
struct Scalar {
    NetworkSpec spec{1, {{1, Activation::linear}}};
    NetworkParams params{{Matrix(1, 1, {1.0})}, {{0.0}}};
    AdamState state;
    Scalar() { state = make_adam_state(spec); }
    double& w() { return params.weights[0](0, 0); }
    void step(double grad, double lr) {
        Gradients g{{Matrix(1, 1, {grad})}, {{0.0}}};
        adam_step(params, g, state, lr);
    }
};

}  // namespace

TEST_CASE("first step on f(w) = w^2 moves w from 1 to about 0.9") {
    Scalar s;
    s.step(2.0 * s.w(), 0.1);
    // With bias correction the first update is lr * g / (|g| + eps).
    const double expected = 1.0 - 0.1 * (2.0 / (2.0 + 1e-8));
    CHECK(s.w() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(s.w() - 0.9) < 1e-6);
    CHECK(s.state.step == 1);
}

TEST_CASE("zero gradient at step one leaves parameters unchanged") {
    Scalar s;
    s.step(0.0, 0.1);
    CHECK(s.w() == 1.0);
}

TEST_CASE("a hundred steps on f(w) = w^2 contract toward zero") {
    Scalar s;
    for (int i = 0; i < 100; ++i) s.step(2.0 * s.w(), 0.1);
    CHECK(std::abs(s.w()) < 0.1);
}

TEST_CASE("non-finite gradients are rejected") {
    Scalar s;
    Gradients g{{Matrix(1, 1, {std::nan("")})}, {{0.0}}};
    CHECK_THROWS_AS(adam_step(s.params, g, s.state, 0.1), std::runtime_error);
    Gradients g2{{Matrix(1, 1, {1.0})}, {{0.0}}};
    CHECK_THROWS_AS(adam_step(s.params, g2, s.state, 0.0), std::invalid_argument);
}

TEST_CASE("moment accumulators follow the defaults") {
    Scalar s;
    CHECK(s.state.beta1 == 0.9);
    CHECK(s.state.beta2 == 0.999);
    CHECK(s.state.eps == 1e-8);
    s.step(2.0, 0.1);
    CHECK(s.state.m_w[0](0, 0) == doctest::Approx(0.2));
    CHECK(s.state.v_w[0](0, 0) == doctest::Approx(0.004));
}
