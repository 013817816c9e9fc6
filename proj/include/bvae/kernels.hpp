#pragma once

#include "bvae/matrix.hpp"

// Dense kernels behind the network engine. Every kernel exists twice: a
// serial reference under kernels::serial and an OpenMP version under
// kernels::par. Both run the same per-row worker, so their results are
// bit-identical; tests assert this and bench_kernels compares throughput.
// The unqualified entry points dispatch on problem size and the runtime
// switch below.
namespace bvae::kernels {

void set_parallel(bool on);
bool parallel_enabled();

// C(m,n) = A(m,k) * B(k,n)
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
// C(m,n) = A(m,k) * B(n,k)^T
void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C);
// C(k,n) = A(m,k)^T * B(m,n)
void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C);

namespace serial {
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C);
}  // namespace serial

namespace par {
void matmul(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_nt(const Matrix& A, const Matrix& B, Matrix& C);
void matmul_tn(const Matrix& A, const Matrix& B, Matrix& C);
}  // namespace par

}  // namespace bvae::kernels
