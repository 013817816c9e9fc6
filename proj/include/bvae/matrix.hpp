#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvae {

// Dense row-major matrix of doubles. The single storage type shared by the
// network engine, the dataset code and the metrics.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
        : rows_(rows), cols_(cols), v_(std::move(values)) {
        if (v_.size() != rows_ * cols_)
            throw std::invalid_argument("Matrix: " + std::to_string(v_.size()) + " values for " +
                                        std::to_string(rows_) + "x" + std::to_string(cols_));
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* row(std::size_t i) { return v_.data() + i * cols_; }
    const double* row(std::size_t i) const { return v_.data() + i * cols_; }

    const std::vector<double>& values() const { return v_; }

    bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
    bool all_finite() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

void require_same_shape(const Matrix& a, const Matrix& b, const char* where);

// [a | b] column-wise; rows must match.
Matrix hcat(const Matrix& a, const Matrix& b);

// Columns [c0, c1) of m.
Matrix col_slice(const Matrix& m, std::size_t c0, std::size_t c1);

}  // namespace bvae
