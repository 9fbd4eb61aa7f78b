#include "patternattr/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "patternattr/errors.hpp"

namespace patternattr {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows.size(), rows.size() == 0 ? 0 : rows.begin()->size());
    std::size_t r = 0;
    for (const auto& row : rows) {
        if (row.size() != m.cols_) {
            throw DimensionMismatch("from_rows: ragged row lengths");
        }
        std::copy(row.begin(), row.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols_));
        ++r;
    }
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols_) {
            throw DimensionMismatch("from_rows: ragged row lengths");
        }
        std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * m.cols_));
    }
    return m;
}

bool Matrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double mean(std::span<const double> v) {
    if (v.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

Vector project_rows(const Matrix& m, std::span<const double> v) {
    if (m.cols() != v.size()) {
        throw DimensionMismatch("project_rows: vector length does not match matrix columns");
    }
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out[r] = dot(m.row(r), v);
    }
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("subtract: shape mismatch");
    }
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.values()[i] = a.values()[i] - b.values()[i];
    }
    return out;
}

Vector covariance_vector(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) {
        throw DimensionMismatch("covariance_vector: sample count does not match target length");
    }
    if (x.rows() < 2) {
        throw DegenerateSample("covariance_vector: need at least 2 samples");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Vector sum_x(d, 0.0);
    Vector sum_xy(d, 0.0);
    double sum_y = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        const double yr = y[r];
        sum_y += yr;
        auto row = x.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            sum_x[j] += row[j];
            sum_xy[j] += row[j] * yr;
        }
    }
    const double nd = static_cast<double>(n);
    const double mean_y = sum_y / nd;
    Vector out(d);
    for (std::size_t j = 0; j < d; ++j) {
        out[j] = sum_xy[j] / nd - (sum_x[j] / nd) * mean_y;
    }
    return out;
}

double pearson(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw DimensionMismatch("pearson: length mismatch");
    }
    if (u.size() < 2) {
        throw DegenerateSample("pearson: need at least 2 samples");
    }
    const double mu = mean(u);
    const double mv = mean(v);
    double suu = 0.0, svv = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u[i] - mu;
        const double dv = v[i] - mv;
        suu += du * du;
        svv += dv * dv;
        suv += du * dv;
    }
    if (suu == 0.0 || svv == 0.0) {
        return 0.0;
    }
    const double r = suv / std::sqrt(suu * svv);
    return std::clamp(r, -1.0, 1.0);
}

namespace {

// In-place lower Cholesky factor of a symmetric k x k matrix; false on a
// non-positive pivot.
bool cholesky_factor(std::vector<double>& a, std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
        double d = a[j * k + j];
        for (std::size_t p = 0; p < j; ++p) {
            d -= a[j * k + p] * a[j * k + p];
        }
        if (!(d > 0.0)) {
            return false;
        }
        const double ljj = std::sqrt(d);
        a[j * k + j] = ljj;
        for (std::size_t i = j + 1; i < k; ++i) {
            double s = a[i * k + j];
            for (std::size_t p = 0; p < j; ++p) {
                s -= a[i * k + p] * a[j * k + p];
            }
            a[i * k + j] = s / ljj;
        }
    }
    return true;
}

Vector cholesky_solve(const std::vector<double>& l, std::size_t k, const Vector& b) {
    Vector z(k);
    for (std::size_t i = 0; i < k; ++i) {
        double s = b[i];
        for (std::size_t p = 0; p < i; ++p) {
            s -= l[i * k + p] * z[p];
        }
        z[i] = s / l[i * k + i];
    }
    Vector x(k);
    for (std::size_t ii = k; ii-- > 0;) {
        double s = z[ii];
        for (std::size_t p = ii + 1; p < k; ++p) {
            s -= l[p * k + ii] * x[p];
        }
        x[ii] = s / l[ii * k + ii];
    }
    return x;
}

}  // namespace

ProjectionCorrelation max_projection_correlation(const Matrix& d, const Vector& y) {
    if (d.rows() != y.size()) {
        throw DimensionMismatch("max_projection_correlation: sample count mismatch");
    }
    if (y.size() < 2) {
        throw DegenerateSample("max_projection_correlation: need at least 2 samples");
    }
    const std::size_t n = d.rows();
    const std::size_t k = d.cols();

    const double ybar = mean(y);
    Vector yc(n);
    double yvar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        yc[i] = y[i] - ybar;
        yvar += yc[i] * yc[i];
    }
    if (yvar == 0.0) {
        throw DegenerateTarget("max_projection_correlation: constant target");
    }
    if (k == 0) {
        return {0.0, {}};
    }

    Vector col_mean(k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = d.row(r);
        for (std::size_t j = 0; j < k; ++j) {
            col_mean[j] += row[j];
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        col_mean[j] /= static_cast<double>(n);
    }
    Matrix dc(n, k);
    for (std::size_t r = 0; r < n; ++r) {
        auto src = d.row(r);
        auto dst = dc.row(r);
        for (std::size_t j = 0; j < k; ++j) {
            dst[j] = src[j] - col_mean[j];
        }
    }

    std::vector<double> gram(k * k, 0.0);
    Vector rhs(k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = dc.row(r);
        for (std::size_t i = 0; i < k; ++i) {
            rhs[i] += row[i] * yc[r];
            for (std::size_t j = i; j < k; ++j) {
                gram[i * k + j] += row[i] * row[j];
            }
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            gram[i * k + j] = gram[j * k + i];
        }
    }

    double mean_diag = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mean_diag += gram[i * k + i];
    }
    mean_diag /= static_cast<double>(k);
    double lambda = 1e-8 * mean_diag;
    if (!(lambda > 0.0)) {
        lambda = 1e-12;
    }

    Vector v(k, 0.0);
    for (int attempt = 0; attempt < 6; ++attempt) {
        std::vector<double> a = gram;
        for (std::size_t i = 0; i < k; ++i) {
            a[i * k + i] += lambda;
        }
        if (cholesky_factor(a, k)) {
            v = cholesky_solve(a, k, rhs);
            break;
        }
        lambda *= 100.0;
    }

    Vector z(n);
    for (std::size_t r = 0; r < n; ++r) {
        z[r] = dot(dc.row(r), v);
    }
    const double rho = std::clamp(pearson(z, yc), 0.0, 1.0);
    return {rho, std::move(v)};
}

}  // namespace patternattr
