#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patternattr/matrix.hpp"

namespace patternattr {

struct SyntheticConfig {
    std::size_t dim = 10;
    std::size_t samples = 1000;
    double noise_scale = 1.0;
    std::uint64_t seed = 0;
};

/// Signal-plus-noise batch built so that the linear read-out w cancels the
/// noise exactly: rows x_n = a_star * y_n + d_n with w^T d_n = 0,
/// w^T a_star = 1, hence w^T x_n = y_n.
struct SyntheticProblem {
    Vector w;
    Vector a_star;
    Matrix x;        // N x D
    Matrix s_true;   // rows a_star * y_n
    Matrix d_noise;  // rows orthogonal to w
    Vector y;        // N
    double noise_scale = 0.0;
};

SyntheticProblem generate_synthetic(const SyntheticConfig& cfg);

/// Tagged description of a signal estimator S(x).
///
/// pattern:    S(x) = a * (w^T x)
/// direction:  S(x) = u * (w^T x) / (w^T u)
/// identity:   S(x) = x
/// zero:       S(x) = 0
/// artificial: S_m(x) = m*x + (1-m)*s, defined against known ground truth;
///             its residual x - S_m(x) = (1-m)*d is scaled noise, which is
///             what makes it a stress case for residual-only criteria.
struct EstimatorSpec {
    enum class Kind { pattern, direction, identity, zero, artificial };

    Kind kind = Kind::identity;
    Vector vec;         // pattern a / direction u
    double m = 0.0;     // artificial mixing factor
    std::string label;  // provenance tag used in reports, e.g. "a_star" or "w"

    static EstimatorSpec pattern(Vector a, std::string label = {});
    static EstimatorSpec direction(Vector u, std::string label = {});
    static EstimatorSpec identity();
    static EstimatorSpec zero();
    static EstimatorSpec artificial(double m);

    std::string name() const;
    std::string params() const;
};

/// Applies the estimator rowwise. s_true is required for artificial specs.
Matrix estimate_signal(const EstimatorSpec& spec, const Matrix& x, const Vector& w,
                       const Matrix* s_true = nullptr);

/// Residual-based quality criterion in [0, 1]:
/// 1 - max_v corr(w^T x, v^T (x - S(x))). High when the residual carries no
/// information about the output.
double rho(const Matrix& x, const Vector& w, const Matrix& s_x);

/// Two-sided criterion in [-1, 1]:
/// max_v1 corr(w^T x, v1^T S(x)) - max_v2 corr(w^T x, v2^T (x - S(x))).
/// The minuend measures signal recovered, the subtrahend signal left in the
/// residual.
double rho_prime(const Matrix& x, const Vector& w, const Matrix& s_x);

/// Largest rowwise violation of w^T S(x_n) = y_n, scaled by max(1, |y_n|).
double max_signal_residual(const Matrix& s_x, const Vector& w, const Vector& y);

struct CriterionRow {
    std::string estimator;
    std::string params;
    double rho = 0.0;
    double rho_prime = 0.0;
};

std::vector<CriterionRow> criteria_report(const SyntheticProblem& problem,
                                          const std::vector<EstimatorSpec>& specs);

/// The benchmark set: identity, zero, pattern(a_star), direction(w) and
/// artificial mixes m in {0, 0.5, 2, 10}.
std::vector<EstimatorSpec> default_estimators(const SyntheticProblem& problem);

}  // namespace patternattr
