#include <doctest.h>

#include "bvae/kernels.hpp"
#include "test_util.hpp"

using namespace bvae;
using testing::random_matrix;

namespace {

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void check_close(const Matrix& a, const Matrix& b, double tol) {
    REQUIRE(a.same_shape(b));
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a.data()[i] - b.data()[i]) <= tol * (1.0 + std::abs(b.data()[i])));
}

}  // namespace

TEST_CASE("matmul matches a naive reference") {
    Rng rng(11);
    for (auto [m, k, n] : {std::array<std::size_t, 3>{2, 3, 2},
                           {5, 7, 3},
                           {16, 33, 9},
                           {1, 1, 1}}) {
        const Matrix a = random_matrix(m, k, rng);
        const Matrix b = random_matrix(k, n, rng);
        Matrix c;
        kernels::matmul(a, b, c);
        check_close(c, naive_matmul(a, b), 1e-12);
    }
}

TEST_CASE("matmul_nt and matmul_tn match transposed naive products") {
    Rng rng(12);
    const Matrix a = random_matrix(6, 10, rng);
    const Matrix b = random_matrix(8, 10, rng);
    Matrix c;
    kernels::matmul_nt(a, b, c);
    check_close(c, naive_matmul(a, transpose(b)), 1e-12);

    const Matrix d = random_matrix(12, 5, rng);
    const Matrix e = random_matrix(12, 7, rng);
    Matrix f;
    kernels::matmul_tn(d, e, f);
    check_close(f, naive_matmul(transpose(d), e), 1e-12);
}

TEST_CASE("serial and parallel kernels are bit-identical") {
    Rng rng(13);
    for (auto [m, k, n] : {std::array<std::size_t, 3>{64, 129, 77},
                           {128, 512, 257},
                           {3, 1000, 3}}) {
        const Matrix a = random_matrix(m, k, rng);
        const Matrix b = random_matrix(k, n, rng);
        Matrix cs, cp;
        kernels::serial::matmul(a, b, cs);
        kernels::par::matmul(a, b, cp);
        CHECK(cs == cp);

        const Matrix bt = random_matrix(n, k, rng);
        Matrix ds, dp;
        kernels::serial::matmul_nt(a, bt, ds);
        kernels::par::matmul_nt(a, bt, dp);
        CHECK(ds == dp);

        const Matrix g = random_matrix(m, n, rng);
        Matrix es, ep;
        kernels::serial::matmul_tn(a, g, es);
        kernels::par::matmul_tn(a, g, ep);
        CHECK(es == ep);
    }
}

TEST_CASE("dispatch result equals the serial reference bit for bit") {
    Rng rng(14);
    const Matrix a = random_matrix(96, 300, rng);  // big enough to take the parallel path
    const Matrix b = random_matrix(300, 200, rng);
    Matrix c1, c2;
    kernels::matmul(a, b, c1);
    kernels::serial::matmul(a, b, c2);
    CHECK(c1 == c2);

    kernels::set_parallel(false);
    Matrix c3;
    kernels::matmul(a, b, c3);
    CHECK(c3 == c2);
    kernels::set_parallel(true);
    CHECK(kernels::parallel_enabled());
}

TEST_CASE("kernels reject shape mismatches") {
    const Matrix a(2, 3), b(4, 5);
    Matrix c;
    CHECK_THROWS_AS(kernels::matmul(a, b, c), std::invalid_argument);
    CHECK_THROWS_AS(kernels::matmul_nt(a, b, c), std::invalid_argument);
    CHECK_THROWS_AS(kernels::matmul_tn(a, b, c), std::invalid_argument);
}
