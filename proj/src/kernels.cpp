#include "bvae/kernels.hpp"

#include <atomic>
#include <cstring>

namespace bvae::kernels {

namespace {

std::atomic<bool> g_parallel{true};

// Below this many multiply-adds the OpenMP fork is not worth it.
constexpr std::size_t kParallelThreshold = 1 << 15;

void check_matmul(const Matrix& A, const Matrix& B, Matrix& C, std::size_t ak, std::size_t bk,
                  std::size_t cm, std::size_t cn, const char* name) {
    if (ak != bk)
        throw std::invalid_argument(std::string(name) + ": inner dims " + std::to_string(ak) +
                                    " vs " + std::to_string(bk));
    if (C.rows() != cm || C.cols() != cn) C = Matrix(cm, cn);
}

// c(1,n) += a(1,k) * B(k,n), accumulating row-by-row of B. The j-loop has no
// reduction, so it vectorizes under strict FP semantics.
inline void saxpy_row(const double* __restrict a, const double* __restrict B,
                      double* __restrict c, std::size_t k, std::size_t n) {
    std::memset(c, 0, n * sizeof(double));
    for (std::size_t kk = 0; kk < k; ++kk) {
        const double aik = a[kk];
        const double* __restrict brow = B + kk * n;
        for (std::size_t j = 0; j < n; ++j) c[j] += aik * brow[j];
    }
}

// Output row i of A^T * B: c(1,n) = sum_r A(r,i) * B(r,:).
inline void tn_row(const double* __restrict A, const double* __restrict B,
                   double* __restrict c, std::size_t i, std::size_t m, std::size_t k,
                   std::size_t n) {
    std::memset(c, 0, n * sizeof(double));
    for (std::size_t r = 0; r < m; ++r) {
        const double ari = A[r * k + i];
        const double* __restrict brow = B + r * n;
        for (std::size_t j = 0; j < n; ++j) c[j] += ari * brow[j];
    }
}

std::vector<double> transpose(const Matrix& B) {
    std::vector<double> bt(B.size());
    for (std::size_t i = 0; i < B.rows(); ++i)
        for (std::size_t j = 0; j < B.cols(); ++j) bt[j * B.rows() + i] = B(i, j);
    return bt;
}

}  // namespace

void set_parallel(bool on) { g_parallel.store(on); }
bool parallel_enabled() { return g_parallel.load(); }

namespace serial {

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.cols(), B.rows(), A.rows(), B.cols(), "matmul");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    for (std::size_t i = 0; i < m; ++i) saxpy_row(A.row(i), B.data(), C.row(i), k, n);
}

void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.cols(), B.cols(), A.rows(), B.rows(), "matmul_nt");
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    const std::vector<double> bt = transpose(B);
    for (std::size_t i = 0; i < m; ++i) saxpy_row(A.row(i), bt.data(), C.row(i), k, n);
}

void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.rows(), B.rows(), A.cols(), B.cols(), "matmul_tn");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
    for (std::size_t i = 0; i < k; ++i) tn_row(A.data(), B.data(), C.row(i), i, m, k, n);
}

}  // namespace serial

namespace par {

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.cols(), B.rows(), A.rows(), B.cols(), "matmul");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i)
        saxpy_row(A.row(static_cast<std::size_t>(i)), B.data(), C.row(static_cast<std::size_t>(i)),
                  k, n);
}

void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.cols(), B.cols(), A.rows(), B.rows(), "matmul_nt");
    const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
    const std::vector<double> bt = transpose(B);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(m); ++i)
        saxpy_row(A.row(static_cast<std::size_t>(i)), bt.data(),
                  C.row(static_cast<std::size_t>(i)), k, n);
}

void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C) {
    check_matmul(A, B, C, A.rows(), B.rows(), A.cols(), B.cols(), "matmul_tn");
    const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(k); ++i)
        tn_row(A.data(), B.data(), C.row(static_cast<std::size_t>(i)),
               static_cast<std::size_t>(i), m, k, n);
}

}  // namespace par

void matmul(const Matrix& A, const Matrix& B, Matrix& C) {
    if (g_parallel.load() && A.rows() * A.cols() * B.cols() >= kParallelThreshold)
        par::matmul(A, B, C);
    else
        serial::matmul(A, B, C);
}

void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C) {
    if (g_parallel.load() && A.rows() * A.cols() * B.rows() >= kParallelThreshold)
        par::matmul_nt(A, B, C);
    else
        serial::matmul_nt(A, B, C);
}

void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C) {
    if (g_parallel.load() && A.rows() * A.cols() * B.cols() >= kParallelThreshold)
        par::matmul_tn(A, B, C);
    else
        serial::matmul_tn(A, B, C);
}

}  // namespace bvae::kernels
