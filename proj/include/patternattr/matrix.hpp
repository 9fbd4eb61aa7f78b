#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace patternattr {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix from_rows(const std::vector<Vector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double mean(std::span<const double> v);

/// Per-row dot products m·v, one value per row.
Vector project_rows(const Matrix& m, std::span<const double> v);

Matrix subtract(const Matrix& a, const Matrix& b);

/// Per-column population covariance with y: E[x_j y] - E[x_j] E[y].
Vector covariance_vector(const Matrix& x, const Vector& y);

/// Sample Pearson correlation. By convention returns exactly 0 when either
/// argument has zero variance; the result is clamped to [-1, 1].
double pearson(std::span<const double> u, std::span<const double> v);

struct ProjectionCorrelation {
    double rho_max = 0.0;  // in [0, 1]
    Vector v_star;
};

/// Best correlation between y and any linear projection of the columns of d
/// (the multiple correlation coefficient). Solved as ridge least squares on
/// centered data with lambda = 1e-8 * mean(diag(Dc^T Dc)); the ridge keeps
/// rank-deficient column sets solvable. The maximum over +/-v makes the
/// optimum nonnegative, so the result is clamped to [0, 1].
ProjectionCorrelation max_projection_correlation(const Matrix& d, const Vector& y);

}  // namespace patternattr
