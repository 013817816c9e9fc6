#include <benchmark/benchmark.h>

#include "bvae/kernels.hpp"
#include "bvae/rng.hpp"

using bvae::Matrix;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    bvae::Rng rng(seed);
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform() - 0.5;
    return m;
}

// The shapes a training step actually hits: batch x in times (out x in)^T.
void bench_matmul_nt_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(128, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    Matrix c;
    for (auto _ : state) {
        bvae::kernels::serial::matmul_nt(a, b, c);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 2 * 128 * n * n);
}

void bench_matmul_nt_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(128, n, 1);
    const Matrix b = random_matrix(n, n, 2);
    Matrix c;
    for (auto _ : state) {
        bvae::kernels::par::matmul_nt(a, b, c);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 2 * 128 * n * n);
}

void bench_matmul_tn_serial(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(128, n, 3);
    const Matrix b = random_matrix(128, n, 4);
    Matrix c;
    for (auto _ : state) {
        bvae::kernels::serial::matmul_tn(a, b, c);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 2 * 128 * n * n);
}

void bench_matmul_tn_parallel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix a = random_matrix(128, n, 3);
    const Matrix b = random_matrix(128, n, 4);
    Matrix c;
    for (auto _ : state) {
        bvae::kernels::par::matmul_tn(a, b, c);
        benchmark::DoNotOptimize(c.data());
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 2 * 128 * n * n);
}

}  // namespace

BENCHMARK(bench_matmul_nt_serial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bench_matmul_nt_parallel)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bench_matmul_tn_serial)->Arg(256)->Arg(512)->Arg(1024);
BENCHMARK(bench_matmul_tn_parallel)->Arg(256)->Arg(512)->Arg(1024);

BENCHMARK_MAIN();
