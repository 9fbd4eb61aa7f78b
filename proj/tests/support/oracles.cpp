#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace patternattr::testing {

namespace {

double abs_corr_for_direction(const Matrix& d, const Vector& y, const Vector& v) {
    const Vector z = project_rows(d, v);
    // When v sits in the null space of d the projection is pure rounding
    // noise; its correlation is meaningless and the same z-direction is
    // reachable from a well-conditioned v anyway, so report 0 here.
    double z_scale = 0.0, cancel_scale = 0.0;
    for (std::size_t r = 0; r < d.rows(); ++r) {
        double row_abs = 0.0;
        for (std::size_t j = 0; j < d.cols(); ++j) {
            row_abs += std::abs(d(r, j) * v[j]);
        }
        z_scale = std::max(z_scale, std::abs(z[r]));
        cancel_scale = std::max(cancel_scale, row_abs);
    }
    if (z_scale <= 1e-9 * cancel_scale) {
        return 0.0;
    }
    return std::abs(pearson(z, y));
}

double search_1d(const Matrix& d, const Vector& y) {
    return abs_corr_for_direction(d, y, {1.0});
}

double search_2d(const Matrix& d, const Vector& y) {
    const double pi = std::acos(-1.0);
    double best = -1.0, best_theta = 0.0;
    double lo = 0.0, hi = pi;
    int points = 720;
    for (int round = 0; round < 9; ++round) {
        for (int i = 0; i <= points; ++i) {
            const double theta = lo + (hi - lo) * i / points;
            const double c = abs_corr_for_direction(d, y, {std::cos(theta), std::sin(theta)});
            if (c > best) {
                best = c;
                best_theta = theta;
            }
        }
        const double span = (hi - lo) / 10.0;
        lo = best_theta - span;
        hi = best_theta + span;
        points = 40;
    }
    return best;
}

double search_3d(const Matrix& d, const Vector& y) {
    const double pi = std::acos(-1.0);
    double best = -1.0, best_theta = 0.0, best_phi = 0.0;
    double theta_lo = 0.0, theta_hi = 2.0 * pi;
    double phi_lo = 0.0, phi_hi = pi;
    int points = 90;
    for (int round = 0; round < 9; ++round) {
        for (int i = 0; i <= points; ++i) {
            const double theta = theta_lo + (theta_hi - theta_lo) * i / points;
            for (int j = 0; j <= points; ++j) {
                const double phi = phi_lo + (phi_hi - phi_lo) * j / points;
                const Vector v{std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
                               std::cos(phi)};
                const double c = abs_corr_for_direction(d, y, v);
                if (c > best) {
                    best = c;
                    best_theta = theta;
                    best_phi = phi;
                }
            }
        }
        const double theta_span = (theta_hi - theta_lo) / 10.0;
        const double phi_span = (phi_hi - phi_lo) / 10.0;
        theta_lo = best_theta - theta_span;
        theta_hi = best_theta + theta_span;
        phi_lo = best_phi - phi_span;
        phi_hi = best_phi + phi_span;
        points = 24;
    }
    return best;
}

}  // namespace

double best_unit_correlation(const Matrix& d, const Vector& y) {
    switch (d.cols()) {
        case 1: return search_1d(d, y);
        case 2: return search_2d(d, y);
        case 3: return search_3d(d, y);
        default: throw std::invalid_argument("best_unit_correlation supports K <= 3");
    }
}

Matrix finite_difference_gradient(const Network& net, const Matrix& embedded, int target_class,
                                  double step) {
    Matrix grad(embedded.rows(), embedded.cols());
    const std::size_t tc = static_cast<std::size_t>(target_class);
    for (std::size_t t = 0; t < embedded.rows(); ++t) {
        for (std::size_t e = 0; e < embedded.cols(); ++e) {
            Matrix plus = embedded;
            plus(t, e) += step;
            Matrix minus = embedded;
            minus(t, e) -= step;
            const double f_plus = forward_embedded(net, std::move(plus)).logits[tc];
            const double f_minus = forward_embedded(net, std::move(minus)).logits[tc];
            grad(t, e) = (f_plus - f_minus) / (2.0 * step);
        }
    }
    return grad;
}

bool trace_kink_safe(const ActivationTrace& trace, double margin) {
    for (double z : trace.conv_pre.values()) {
        if (std::abs(z) < margin) {
            return false;
        }
    }
    for (double z : trace.dense1_pre) {
        if (std::abs(z) < margin) {
            return false;
        }
    }
    const std::size_t f_num = trace.pool_argmax.size();
    const std::size_t windows = trace.conv_pre.rows();
    for (std::size_t f = 0; f < f_num; ++f) {
        const double top = std::max(0.0, trace.conv_pre(trace.pool_argmax[f], f));
        if (top == 0.0) {
            continue;
        }
        for (std::size_t t = 0; t < windows; ++t) {
            if (t == trace.pool_argmax[f]) {
                continue;
            }
            if (top - std::max(0.0, trace.conv_pre(t, f)) < margin) {
                return false;
            }
        }
    }
    return true;
}

ConservationCase make_conservation_case(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto draw_size = [&](std::size_t lo, std::size_t hi) {
        return lo + rng() % (hi - lo + 1);
    };
    const std::size_t t_len = draw_size(3, 8);
    const std::size_t e = draw_size(3, 8);
    const std::size_t f_num = draw_size(2, 6);
    const std::size_t h_num = draw_size(2, 6);
    const std::size_t v = t_len + draw_size(1, 4);

    std::uniform_real_distribution<double> positive(0.02, 0.12);
    auto fill_positive = [&](auto& container) {
        for (double& x : container) {
            x = positive(rng);
        }
    };

    ConservationCase cc;
    cc.net.vocab_size = v;
    cc.net.embed_dim = e;
    cc.net.num_filters = f_num;
    cc.net.hidden_dim = h_num;
    cc.net.dropout_rate = 0.0;
    cc.net.embedding = Matrix(v, e);
    cc.net.conv_w = Matrix(f_num, 2 * e);
    cc.net.conv_b = Vector(f_num);
    cc.net.dense1_w = Matrix(h_num, f_num);
    cc.net.dense1_b = Vector(h_num);
    cc.net.dense2_w = Matrix(2, h_num);
    cc.net.dense2_b = Vector(2);
    fill_positive(cc.net.embedding.values());
    fill_positive(cc.net.conv_w.values());
    fill_positive(cc.net.conv_b);
    fill_positive(cc.net.dense1_w.values());
    fill_positive(cc.net.dense1_b);
    fill_positive(cc.net.dense2_w.values());
    fill_positive(cc.net.dense2_b);

    std::uniform_real_distribution<double> pattern_draw(0.1, 1.0);
    auto normalized_patterns = [&](const Matrix& w) {
        Matrix a(w.rows(), w.cols());
        for (double& x : a.values()) {
            x = pattern_draw(rng);
        }
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const double wa = dot(w.row(r), a.row(r));
            for (double& x : a.row(r)) {
                x /= wa;
            }
        }
        return a;
    };
    cc.patterns.conv_a = normalized_patterns(cc.net.conv_w);
    cc.patterns.dense1_a = normalized_patterns(cc.net.dense1_w);
    cc.patterns.dense2_a = normalized_patterns(cc.net.dense2_w);
    cc.patterns.sample_count = 0;

    cc.token_ids.resize(t_len);
    for (int& id : cc.token_ids) {
        id = static_cast<int>(rng() % v);
    }
    return cc;
}

}  // namespace patternattr::testing
