#include <cmath>
#include <random>

#include <doctest.h>

#include "patternattr/errors.hpp"
#include "patternattr/matrix.hpp"
#include "support/oracles.hpp"

using namespace patternattr;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (double& v : m.values()) {
        v = normal(rng);
    }
    return m;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (double& x : v) {
        x = normal(rng);
    }
    return v;
}

}  // namespace

TEST_CASE("covariance_vector matches direct summation") {
    const Matrix x = Matrix::from_rows({{1, 0}, {0, 1}, {-1, 0}});
    const Vector y{1, 0, -1};

    // independent oracle: raw sums evaluated directly
    Vector expected(2);
    for (std::size_t j = 0; j < 2; ++j) {
        double sxy = 0, sx = 0, sy = 0;
        for (std::size_t r = 0; r < 3; ++r) {
            sxy += x(r, j) * y[r];
            sx += x(r, j);
            sy += y[r];
        }
        expected[j] = sxy / 3.0 - (sx / 3.0) * (sy / 3.0);
    }
    CHECK(expected[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    const Vector cov = covariance_vector(x, y);
    CHECK(cov[0] == doctest::Approx(expected[0]).epsilon(1e-12));
    CHECK(std::abs(cov[1]) < 1e-15);
}

TEST_CASE("covariance_vector is zero against a constant target") {
    std::mt19937_64 rng(11);
    const Matrix x = random_matrix(20, 4, rng);
    const Vector y(20, 3.5);
    for (double c : covariance_vector(x, y)) {
        CHECK(std::abs(c) < 1e-12);
    }
}

TEST_CASE("covariance_vector two-sample hand case") {
    const Matrix x = Matrix::from_rows({{1}, {-1}});
    const Vector y{1, -1};
    CHECK(covariance_vector(x, y)[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("covariance_vector rejects bad inputs") {
    const Matrix x = Matrix::from_rows({{1}, {2}});
    CHECK_THROWS_AS(covariance_vector(x, {1, 2, 3}), DimensionMismatch);
    const Matrix one_row = Matrix::from_rows({{1, 2}});
    CHECK_THROWS_AS(covariance_vector(one_row, {1}), DegenerateSample);
}

TEST_CASE("covariance_vector is linear in y") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = random_matrix(30, 5, rng);
        const Vector y1 = random_vector(30, rng);
        const Vector y2 = random_vector(30, rng);
        const double alpha = 1.7, beta = -0.4;
        Vector mixed(30);
        for (std::size_t i = 0; i < 30; ++i) {
            mixed[i] = alpha * y1[i] + beta * y2[i];
        }
        const Vector lhs = covariance_vector(x, mixed);
        const Vector c1 = covariance_vector(x, y1);
        const Vector c2 = covariance_vector(x, y2);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(std::abs(lhs[j] - (alpha * c1[j] + beta * c2[j])) < 1e-12);
        }
    }
}

TEST_CASE("pearson basics") {
    CHECK(pearson(Vector{1, 2, 3}, Vector{1, 2, 3}) == doctest::Approx(1.0));
    CHECK(pearson(Vector{1, 2, 3}, Vector{-1, -2, -3}) == doctest::Approx(-1.0));
    CHECK(pearson(Vector{1, 2, 3}, Vector{5, 5, 5}) == 0.0);
    CHECK_THROWS_AS(pearson(Vector{1, 2}, Vector{1, 2, 3}), DimensionMismatch);
}

TEST_CASE("pearson is symmetric, bounded and affine-invariant") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector u = random_vector(25, rng);
        const Vector v = random_vector(25, rng);
        const double r = pearson(u, v);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        CHECK(pearson(v, u) == doctest::Approx(r).epsilon(1e-12));

        Vector scaled(25);
        for (std::size_t i = 0; i < 25; ++i) {
            scaled[i] = 2.5 * u[i] + 7.0;
        }
        CHECK(pearson(scaled, v) == doctest::Approx(r).epsilon(1e-9));
    }
}

TEST_CASE("max_projection_correlation finds an exact column") {
    std::mt19937_64 rng(23);
    const Vector y = random_vector(40, rng);
    Matrix d = random_matrix(40, 3, rng);
    for (std::size_t r = 0; r < 40; ++r) {
        d(r, 1) = y[r];
    }
    CHECK(max_projection_correlation(d, y).rho_max >= 1.0 - 1e-6);
}

TEST_CASE("max_projection_correlation of an all-zero matrix is 0") {
    const Matrix d(5, 3, 0.0);
    const Vector y{1, 2, 3, 4, 5};
    CHECK(max_projection_correlation(d, y).rho_max == 0.0);
}

TEST_CASE("max_projection_correlation single-regressor closed form") {
    const Matrix d = Matrix::from_rows({{1}, {-1}, {1}, {-1}});
    const Vector y{2, 0, 1, 1};
    // closed form: with one regressor the optimum is |pearson(column, y)|
    const double expected = std::abs(pearson(Vector{1, -1, 1, -1}, y));
    CHECK(expected == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(max_projection_correlation(d, y).rho_max == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("max_projection_correlation rejects a constant target") {
    const Matrix d = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK_THROWS_AS(max_projection_correlation(d, {2, 2}), DegenerateTarget);
}

TEST_CASE("max_projection_correlation dominates every single column") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix d = random_matrix(30, 4, rng);
        const Vector y = random_vector(30, rng);
        const double rho = max_projection_correlation(d, y).rho_max;
        for (std::size_t k = 0; k < 4; ++k) {
            Vector col(30);
            for (std::size_t r = 0; r < 30; ++r) {
                col[r] = d(r, k);
            }
            CHECK(rho >= std::abs(pearson(col, y)) - 1e-6);
        }
    }
}

TEST_CASE("max_projection_correlation agrees with the unit-sphere grid search") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t k = 1 + trial % 3;
        const std::size_t n = 10 + rng() % 41;
        Matrix d = random_matrix(n, k, rng);
        if (trial % 4 == 3 && k >= 2) {
            for (std::size_t r = 0; r < n; ++r) {
                d(r, k - 1) = d(r, 0);  // rank-deficient column set
            }
        }
        Vector y = random_vector(n, rng);
        if (trial % 2 == 0) {
            for (std::size_t r = 0; r < n; ++r) {
                y[r] = d(r, 0) + 0.5 * random_vector(1, rng)[0];
            }
        }
        const double solver = max_projection_correlation(d, y).rho_max;
        const double oracle = patternattr::testing::best_unit_correlation(d, y);
        CHECK(solver == doctest::Approx(oracle).epsilon(1e-6));
    }
}
