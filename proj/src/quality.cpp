#include "patternattr/quality.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <utility>

#include "patternattr/errors.hpp"

namespace patternattr {

namespace {

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

SyntheticProblem generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.dim < 2 || cfg.samples < 2) {
        throw BadConfig("generate_synthetic: need dim >= 2 and samples >= 2");
    }
    if (!(cfg.noise_scale >= 0.0) || !std::isfinite(cfg.noise_scale)) {
        throw BadConfig("generate_synthetic: noise_scale must be finite and >= 0");
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t d = cfg.dim;
    const std::size_t n = cfg.samples;

    SyntheticProblem p;
    p.noise_scale = cfg.noise_scale;
    p.w.resize(d);
    for (double& wi : p.w) {
        wi = normal(rng);
    }

    Vector a(d);
    double wa = 0.0;
    do {
        for (double& ai : a) {
            ai = normal(rng);
        }
        wa = dot(p.w, a);
    } while (std::abs(wa) < 1e-6);
    p.a_star.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        p.a_star[j] = a[j] / wa;
    }

    const double ww = dot(p.w, p.w);
    p.y.resize(n);
    p.x = Matrix(n, d);
    p.s_true = Matrix(n, d);
    p.d_noise = Matrix(n, d);
    Vector g(d);
    for (std::size_t r = 0; r < n; ++r) {
        const double yr = normal(rng);
        p.y[r] = yr;
        for (double& gi : g) {
            gi = normal(rng);
        }
        const double along = dot(p.w, g) / ww;
        auto xr = p.x.row(r);
        auto sr = p.s_true.row(r);
        auto dr = p.d_noise.row(r);
        for (std::size_t j = 0; j < d; ++j) {
            dr[j] = (g[j] - along * p.w[j]) * cfg.noise_scale;
            sr[j] = p.a_star[j] * yr;
            xr[j] = sr[j] + dr[j];
        }
    }
    return p;
}

EstimatorSpec EstimatorSpec::pattern(Vector a, std::string label) {
    EstimatorSpec s;
    s.kind = Kind::pattern;
    s.vec = std::move(a);
    s.label = std::move(label);
    return s;
}

EstimatorSpec EstimatorSpec::direction(Vector u, std::string label) {
    EstimatorSpec s;
    s.kind = Kind::direction;
    s.vec = std::move(u);
    s.label = std::move(label);
    return s;
}

EstimatorSpec EstimatorSpec::identity() {
    EstimatorSpec s;
    s.kind = Kind::identity;
    return s;
}

EstimatorSpec EstimatorSpec::zero() {
    EstimatorSpec s;
    s.kind = Kind::zero;
    return s;
}

EstimatorSpec EstimatorSpec::artificial(double m) {
    EstimatorSpec s;
    s.kind = Kind::artificial;
    s.m = m;
    return s;
}

std::string EstimatorSpec::name() const {
    switch (kind) {
        case Kind::pattern: return "pattern";
        case Kind::direction: return "direction";
        case Kind::identity: return "identity";
        case Kind::zero: return "zero";
        case Kind::artificial: return "artificial";
    }
    return "unknown";
}

std::string EstimatorSpec::params() const {
    switch (kind) {
        case Kind::pattern: return "a=" + (label.empty() ? std::string("custom") : label);
        case Kind::direction: return "u=" + (label.empty() ? std::string("custom") : label);
        case Kind::artificial: return "m=" + format_number(m);
        case Kind::identity:
        case Kind::zero: return "";
    }
    return "";
}

Matrix estimate_signal(const EstimatorSpec& spec, const Matrix& x, const Vector& w,
                       const Matrix* s_true) {
    if (x.cols() != w.size()) {
        throw DimensionMismatch("estimate_signal: w length does not match data columns");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Matrix s(n, d);

    switch (spec.kind) {
        case EstimatorSpec::Kind::identity:
            s = x;
            break;
        case EstimatorSpec::Kind::zero:
            break;
        case EstimatorSpec::Kind::pattern: {
            if (spec.vec.size() != d) {
                throw DimensionMismatch("estimate_signal: pattern length mismatch");
            }
            for (std::size_t r = 0; r < n; ++r) {
                const double yr = dot(w, x.row(r));
                auto sr = s.row(r);
                for (std::size_t j = 0; j < d; ++j) {
                    sr[j] = spec.vec[j] * yr;
                }
            }
            break;
        }
        case EstimatorSpec::Kind::direction: {
            if (spec.vec.size() != d) {
                throw DimensionMismatch("estimate_signal: direction length mismatch");
            }
            const double wu = dot(w, spec.vec);
            if (std::abs(wu) < 1e-12) {
                throw DegenerateDirection("estimate_signal: direction nearly orthogonal to w");
            }
            for (std::size_t r = 0; r < n; ++r) {
                const double scale = dot(w, x.row(r)) / wu;
                auto sr = s.row(r);
                for (std::size_t j = 0; j < d; ++j) {
                    sr[j] = spec.vec[j] * scale;
                }
            }
            break;
        }
        case EstimatorSpec::Kind::artificial: {
            if (s_true == nullptr) {
                throw MissingGroundTruth("estimate_signal: artificial estimator needs s_true");
            }
            if (s_true->rows() != n || s_true->cols() != d) {
                throw DimensionMismatch("estimate_signal: s_true shape mismatch");
            }
            for (std::size_t i = 0; i < s.size(); ++i) {
                s.values()[i] = spec.m * x.values()[i] + (1.0 - spec.m) * s_true->values()[i];
            }
            break;
        }
    }
    return s;
}

double rho(const Matrix& x, const Vector& w, const Matrix& s_x) {
    if (s_x.rows() != x.rows() || s_x.cols() != x.cols()) {
        throw DimensionMismatch("rho: estimate shape mismatch");
    }
    const Vector y = project_rows(x, w);
    const Matrix residual = subtract(x, s_x);
    return 1.0 - max_projection_correlation(residual, y).rho_max;
}

double rho_prime(const Matrix& x, const Vector& w, const Matrix& s_x) {
    if (s_x.rows() != x.rows() || s_x.cols() != x.cols()) {
        throw DimensionMismatch("rho_prime: estimate shape mismatch");
    }
    const Vector y = project_rows(x, w);
    const Matrix residual = subtract(x, s_x);
    const double recovered = max_projection_correlation(s_x, y).rho_max;
    const double leaked = max_projection_correlation(residual, y).rho_max;
    return recovered - leaked;
}

double max_signal_residual(const Matrix& s_x, const Vector& w, const Vector& y) {
    if (s_x.rows() != y.size() || s_x.cols() != w.size()) {
        throw DimensionMismatch("max_signal_residual: shape mismatch");
    }
    double worst = 0.0;
    for (std::size_t r = 0; r < s_x.rows(); ++r) {
        const double err = std::abs(dot(w, s_x.row(r)) - y[r]) / std::max(1.0, std::abs(y[r]));
        worst = std::max(worst, err);
    }
    return worst;
}

std::vector<CriterionRow> criteria_report(const SyntheticProblem& problem,
                                          const std::vector<EstimatorSpec>& specs) {
    if (specs.empty()) {
        throw EmptySpecList("criteria_report: no estimators given");
    }
    std::vector<CriterionRow> rows;
    rows.reserve(specs.size());
    for (const auto& spec : specs) {
        const Matrix s = estimate_signal(spec, problem.x, problem.w, &problem.s_true);
        rows.push_back({spec.name(), spec.params(), rho(problem.x, problem.w, s),
                        rho_prime(problem.x, problem.w, s)});
    }
    return rows;
}

std::vector<EstimatorSpec> default_estimators(const SyntheticProblem& problem) {
    std::vector<EstimatorSpec> specs;
    specs.push_back(EstimatorSpec::identity());
    specs.push_back(EstimatorSpec::zero());
    specs.push_back(EstimatorSpec::pattern(problem.a_star, "a_star"));
    specs.push_back(EstimatorSpec::direction(problem.w, "w"));
    for (double m : {0.0, 0.5, 2.0, 10.0}) {
        specs.push_back(EstimatorSpec::artificial(m));
    }
    return specs;
}

}  // namespace patternattr
