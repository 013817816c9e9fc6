#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace bvae {

// xoshiro256++ with hand-rolled distributions. The standard <random>
// distributions are implementation-defined, which would tie checkpoints and
// frozen test values to one libstdc++ version; everything here is pinned to
// this file. State is four words, captured exactly by checkpoints.
class Rng {
public:
    using State = std::array<std::uint64_t, 4>;

    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53 bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; log1p(-u) keeps the argument in (0, 1].
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    void fill_normal(double* out, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) out[i] = normal();
    }

    // Unbiased integer in [0, n) by masked rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: empty range");
        if (n == 1) return 0;
        const int bits = 64 - std::countl_zero(n - 1);
        const std::uint64_t mask = bits >= 64 ? ~0ull : (1ull << bits) - 1;
        for (;;) {
            const std::uint64_t r = next() & mask;
            if (r < n) return r;
        }
    }

    // Marsaglia-Tsang, with the alpha < 1 boost.
    double gamma(double alpha) {
        if (!(alpha > 0.0)) throw std::invalid_argument("Rng::gamma: alpha must be > 0");
        if (alpha < 1.0) {
            const double u = uniform();
            return gamma(alpha + 1.0) * std::pow(1.0 - u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    void dirichlet(const std::vector<double>& alpha, double* out) {
        double sum = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            out[i] = gamma(alpha[i]);
            sum += out[i];
        }
        if (sum <= 0.0) {  // all-zero draw is measure-zero but keep it total
            out[0] = 1.0;
            for (std::size_t i = 1; i < alpha.size(); ++i) out[i] = 0.0;
            return;
        }
        for (std::size_t i = 0; i < alpha.size(); ++i) out[i] /= sum;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    const State& state() const { return s_; }
    void set_state(const State& s) { s_ = s; }

    static std::uint64_t splitmix(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    State s_{};
};

// Independent substream for (seed, tags...). Used so evaluation, shuffling
// and generation never consume from the training stream: changing the eval
// cadence must not change the training trajectory.
inline Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t x = seed;
    Rng::splitmix(x);
    for (std::uint64_t t : tags) {
        x ^= t + 0x9e3779b97f4a7c15ull + (x << 6) + (x >> 2);
        Rng::splitmix(x);
    }
    return Rng(x);
}

}  // namespace bvae
