#include "bvae/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bvae/kernels.hpp"

namespace bvae {

namespace {

constexpr std::uint64_t kTagReference = 0x726566;
constexpr std::size_t kKlBins = 50;
constexpr double kKlSmoothing = 1e-8;

double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i]));
    return m;
}

double frobenius(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * a.data()[i];
    return std::sqrt(s);
}

}  // namespace

MomentSummary moments(const Matrix& rows) {
    if (rows.rows() < 2)
        throw std::invalid_argument("moments: need at least 2 rows for a sample covariance");
    const std::size_t n = rows.rows(), d = rows.cols();
    MomentSummary s;
    s.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = rows.row(i);
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) centered(i, j) = rows(i, j) - s.mean[j];
    kernels::matmul_tn(centered, centered, s.cov);
    const double inv = 1.0 / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < s.cov.size(); ++i) s.cov.data()[i] *= inv;
    return s;
}

void jacobi_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& v) {
    if (a.rows() != a.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
    const std::size_t n = a.rows();
    Matrix m = a;
    v = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
        if (off <= 1e-30 * (1.0 + frobenius(a) * frobenius(a))) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double app = m(p, p), aqq = m(q, q);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = m(i, i);
}

Matrix matrix_sqrt_psd(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("matrix_sqrt_psd: matrix must be square");
    const std::size_t n = a.rows();
    const double scale = 1.0 + max_abs(a);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(a(i, j) - a(j, i)) > 1e-8 * scale)
                throw std::invalid_argument("matrix_sqrt_psd: input is not symmetric");

    Matrix sym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));

    std::vector<double> w;
    Matrix v;
    jacobi_eigen(sym, w, v);
    double w_max = 0.0;
    for (double x : w) w_max = std::max(w_max, x);
    for (double& x : w) {
        if (x < -1e-8 * (1.0 + w_max))
            throw std::invalid_argument("matrix_sqrt_psd: input is not PSD (eigenvalue " +
                                        std::to_string(x) + ")");
        x = x > 0.0 ? std::sqrt(x) : 0.0;
    }

    // S = V diag(sqrt(w)) V^T, built symmetric.
    Matrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) scaled(i, j) = v(i, j) * w[j];
    Matrix vt(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) vt(i, j) = v(j, i);
    Matrix s;
    kernels::matmul(scaled, vt, s);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (s(i, j) + s(j, i));
            s(i, j) = avg;
            s(j, i) = avg;
        }
    return s;
}

double fid_star(const Matrix& real_emb, const Matrix& gen_emb) {
    if (real_emb.cols() != gen_emb.cols())
        throw std::invalid_argument("fid_star: embedding dims differ");
    const MomentSummary r = moments(real_emb);
    const MomentSummary g = moments(gen_emb);
    const std::size_t d = r.mean.size();

    double mean_sq = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = r.mean[i] - g.mean[i];
        mean_sq += diff * diff;
    }

    const Matrix sqrt_r = matrix_sqrt_psd(r.cov);
    Matrix tmp, middle;
    kernels::matmul(sqrt_r, g.cov, tmp);
    kernels::matmul(tmp, sqrt_r, middle);
    const Matrix cross = matrix_sqrt_psd(middle);

    double trace_term = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        trace_term += r.cov(i, i) + g.cov(i, i) - 2.0 * cross(i, i);

    const double fid = mean_sq + trace_term;
    if (fid < -1e-6)
        throw std::runtime_error("fid_star: value " + std::to_string(fid) +
                                 " is negative beyond roundoff");
    return std::max(fid, 0.0);
}

double kl_score(const Matrix& real_props, const Matrix& gen_props) {
    if (real_props.rows() == 0 || gen_props.rows() == 0)
        throw std::invalid_argument("kl_score: empty input");
    if (real_props.cols() != gen_props.cols())
        throw std::invalid_argument("kl_score: property counts differ");

    const std::size_t n_props = real_props.cols();
    double total = 0.0;
    for (std::size_t k = 0; k < n_props; ++k) {
        double lo = real_props(0, k), hi = real_props(0, k);
        for (std::size_t i = 0; i < real_props.rows(); ++i) {
            lo = std::min(lo, real_props(i, k));
            hi = std::max(hi, real_props(i, k));
        }
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double width = (hi - lo) / static_cast<double>(kKlBins);
        auto bin_of = [&](double v) {
            const auto b = static_cast<long long>(std::floor((v - lo) / width));
            return static_cast<std::size_t>(
                std::clamp<long long>(b, 0, static_cast<long long>(kKlBins) - 1));
        };
        std::vector<double> real_hist(kKlBins, 0.0), gen_hist(kKlBins, 0.0);
        for (std::size_t i = 0; i < real_props.rows(); ++i)
            real_hist[bin_of(real_props(i, k))] += 1.0;
        for (std::size_t i = 0; i < gen_props.rows(); ++i)
            gen_hist[bin_of(gen_props(i, k))] += 1.0;

        double real_sum = 0.0, gen_sum = 0.0;
        for (std::size_t b = 0; b < kKlBins; ++b) {
            real_hist[b] = real_hist[b] / static_cast<double>(real_props.rows()) + kKlSmoothing;
            gen_hist[b] = gen_hist[b] / static_cast<double>(gen_props.rows()) + kKlSmoothing;
            real_sum += real_hist[b];
            gen_sum += gen_hist[b];
        }
        double kl = 0.0;
        for (std::size_t b = 0; b < kKlBins; ++b) {
            const double p = gen_hist[b] / gen_sum;
            const double q = real_hist[b] / real_sum;
            kl += p * std::log(p / q);
        }
        total += std::max(kl, 0.0);
    }
    return total / static_cast<double>(n_props);
}

double era(const Matrix& generations, const RuleSet& rules) {
    if (generations.rows() == 0) throw std::invalid_argument("era: empty generations");
    std::size_t passed = 0;
    for (std::size_t i = 0; i < generations.rows(); ++i)
        if (check_rules(generations.row(i), generations.cols(), rules).pass) ++passed;
    return 100.0 * static_cast<double>(passed) / static_cast<double>(generations.rows());
}

ReferenceScores reference_scores(const CompoundDataset& data, const PropertyPredictor& pred,
                                 const RuleSet& rules, std::uint64_t seed) {
    const std::size_t n = data.ratios.rows();
    if (n < 4) throw std::invalid_argument("reference_scores: dataset too small to split");
    Rng rng = derive_rng(seed, {kTagReference});

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t half = n / 2;
    Matrix half_a(half, data.ratios.cols()), half_b(half, data.ratios.cols());
    Matrix props_a(half, data.properties.cols());
    for (std::size_t i = 0; i < half; ++i) {
        for (std::size_t j = 0; j < data.ratios.cols(); ++j) {
            half_a(i, j) = data.ratios(order[i], j);
            half_b(i, j) = data.ratios(order[half + i], j);
        }
        for (std::size_t k = 0; k < data.properties.cols(); ++k)
            props_a(i, k) = data.properties(order[i], k);
    }

    Matrix noise(n, data.ratios.cols());
    for (std::size_t i = 0; i < noise.size(); ++i)
        noise.data()[i] = std::clamp(rng.normal(), 0.0, 1.0);

    ReferenceScores out;
    out.fid_test = fid_star(embed(pred, half_a), embed(pred, half_b));
    out.fid_noise = fid_star(embed(pred, data.ratios), embed(pred, noise));
    out.kl_test = kl_score(props_a, predict(pred, half_b));
    out.kl_noise = kl_score(data.properties, predict(pred, noise));
    out.era_real = era(data.ratios, rules);
    out.era_noise = era(noise, rules);
    return out;
}

}  // namespace bvae
