#pragma once

#include "bvae/predictor.hpp"
#include "bvae/rules.hpp"

namespace bvae {

struct MomentSummary {
    std::vector<double> mean;
    Matrix cov;  // unbiased sample covariance
};

MomentSummary moments(const Matrix& rows);

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenvectors are
// the columns of v.
void jacobi_eigen(const Matrix& a, std::vector<double>& eigenvalues, Matrix& v);

// Symmetric PSD square root via eigendecomposition. Mildly negative
// eigenvalues from roundoff are clamped to zero; clearly non-PSD or
// non-symmetric input is rejected.
Matrix matrix_sqrt_psd(const Matrix& a);

// Squared mean distance plus the Frechet covariance term; the cross term is
// computed as sqrt(sqrt(S_r) S_g sqrt(S_r)) to keep the solver in the
// symmetric regime. Clamped to >= 0.
double fid_star(const Matrix& real_emb, const Matrix& gen_emb);

// Per property: 50-bin histograms over the real range (generated values are
// clipped into the end bins), Laplace smoothing 1e-8, KL(generated || real);
// returns the mean over the three properties.
double kl_score(const Matrix& real_props, const Matrix& gen_props);

// Percentage of rows satisfying every rule.
double era(const Matrix& generations, const RuleSet& rules);

struct ReferenceScores {
    double fid_test = 0.0, fid_noise = 0.0;
    double kl_test = 0.0, kl_noise = 0.0;
    double era_real = 0.0, era_noise = 0.0;
};

// test = metric between two disjoint random halves of the real data;
// noise = metric between the real data and an equal-sized standard-Gaussian
// sample clamped to [0, 1] before entering the predictor. For ERA the
// references are the real rows' own pass rate and the noise pass rate.
ReferenceScores reference_scores(const CompoundDataset& data, const PropertyPredictor& pred,
                                 const RuleSet& rules, std::uint64_t seed);

}  // namespace bvae
