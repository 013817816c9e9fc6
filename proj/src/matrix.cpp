#include "bvae/matrix.hpp"

#include <cmath>

namespace bvae {

bool Matrix::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* where) {
    if (!a.same_shape(b))
        throw std::invalid_argument(std::string(where) + ": shape mismatch " +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()));
}

Matrix hcat(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows())
        throw std::invalid_argument("hcat: row mismatch " + std::to_string(a.rows()) + " vs " +
                                    std::to_string(b.rows()));
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i);
        const double* ra = a.row(i);
        const double* rb = b.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = ra[j];
        for (std::size_t j = 0; j < b.cols(); ++j) dst[a.cols() + j] = rb[j];
    }
    return out;
}

Matrix col_slice(const Matrix& m, std::size_t c0, std::size_t c1) {
    if (c0 > c1 || c1 > m.cols())
        throw std::invalid_argument("col_slice: bad range [" + std::to_string(c0) + ", " +
                                    std::to_string(c1) + ") for " + std::to_string(m.cols()) +
                                    " columns");
    Matrix out(m.rows(), c1 - c0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* src = m.row(i) + c0;
        double* dst = out.row(i);
        for (std::size_t j = 0; j < c1 - c0; ++j) dst[j] = src[j];
    }
    return out;
}

}  // namespace bvae
