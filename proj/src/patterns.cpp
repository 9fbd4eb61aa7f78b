#include "patternattr/patterns.hpp"

#include <cmath>

#include "patternattr/errors.hpp"

namespace patternattr {

NeuronStats::NeuronStats(std::size_t input_dim)
    : sum_x_all(input_dim, 0.0),
      sum_x_pos(input_dim, 0.0),
      sum_xy_all(input_dim, 0.0),
      sum_xy_pos(input_dim, 0.0) {}

NeuronStats merge(const NeuronStats& a, const NeuronStats& b) {
    if (a.input_dim() != b.input_dim()) {
        throw ShapeMismatch("merge: neuron stats input dims differ");
    }
    NeuronStats out(a.input_dim());
    out.n_all = a.n_all + b.n_all;
    out.n_pos = a.n_pos + b.n_pos;
    out.sum_y_all = a.sum_y_all + b.sum_y_all;
    out.sum_y_pos = a.sum_y_pos + b.sum_y_pos;
    out.sum_yy_all = a.sum_yy_all + b.sum_yy_all;
    for (std::size_t i = 0; i < out.input_dim(); ++i) {
        out.sum_x_all[i] = a.sum_x_all[i] + b.sum_x_all[i];
        out.sum_x_pos[i] = a.sum_x_pos[i] + b.sum_x_pos[i];
        out.sum_xy_all[i] = a.sum_xy_all[i] + b.sum_xy_all[i];
        out.sum_xy_pos[i] = a.sum_xy_pos[i] + b.sum_xy_pos[i];
    }
    return out;
}

LayerStats::LayerStats(std::size_t input_dim, std::size_t num_neurons)
    : input_dim(input_dim), neurons(num_neurons, NeuronStats(input_dim)) {}

void LayerStats::accumulate(std::span<const double> x, std::span<const double> z,
                            std::span<const std::uint8_t> active) {
    if (x.size() != input_dim) {
        throw ShapeMismatch("accumulate: input dim mismatch");
    }
    if (z.size() != neurons.size() || active.size() != neurons.size()) {
        throw ShapeMismatch("accumulate: neuron count mismatch");
    }
    for (std::size_t j = 0; j < neurons.size(); ++j) {
        NeuronStats& ns = neurons[j];
        const double y = z[j];
        ++ns.n_all;
        ns.sum_y_all += y;
        ns.sum_yy_all += y * y;
        for (std::size_t i = 0; i < input_dim; ++i) {
            ns.sum_x_all[i] += x[i];
            ns.sum_xy_all[i] += x[i] * y;
        }
        if (active[j]) {
            ++ns.n_pos;
            ns.sum_y_pos += y;
            for (std::size_t i = 0; i < input_dim; ++i) {
                ns.sum_x_pos[i] += x[i];
                ns.sum_xy_pos[i] += x[i] * y;
            }
        }
    }
}

LayerStats merge(const LayerStats& a, const LayerStats& b) {
    if (a.input_dim != b.input_dim || a.neurons.size() != b.neurons.size()) {
        throw ShapeMismatch("merge: layer stats shapes differ");
    }
    LayerStats out(a.input_dim, 0);
    out.neurons.reserve(a.neurons.size());
    for (std::size_t j = 0; j < a.neurons.size(); ++j) {
        out.neurons.push_back(merge(a.neurons[j], b.neurons[j]));
    }
    return out;
}

FinalizedPattern finalize_linear(const NeuronStats& stats, std::span<const double> w) {
    if (w.size() != stats.input_dim()) {
        throw ShapeMismatch("finalize_linear: weight length mismatch");
    }
    FinalizedPattern out{Vector(stats.input_dim(), 0.0), false};
    if (stats.n_all < 2) {
        return out;
    }
    const double n = static_cast<double>(stats.n_all);
    const double mean_y = stats.sum_y_all / n;
    const double var_y = stats.sum_yy_all / n - mean_y * mean_y;
    if (var_y <= 1e-12) {
        return out;
    }
    for (std::size_t i = 0; i < stats.input_dim(); ++i) {
        const double cov = stats.sum_xy_all[i] / n - (stats.sum_x_all[i] / n) * mean_y;
        out.a[i] = cov / var_y;
    }
    out.valid = true;
    return out;
}

FinalizedPattern finalize_relu(const NeuronStats& stats, std::span<const double> w) {
    if (w.size() != stats.input_dim()) {
        throw ShapeMismatch("finalize_relu: weight length mismatch");
    }
    FinalizedPattern out{Vector(stats.input_dim(), 0.0), false};
    if (stats.n_pos < 2) {
        return out;
    }
    const double n = static_cast<double>(stats.n_pos);
    const double mean_y = stats.sum_y_pos / n;
    Vector c(stats.input_dim());
    for (std::size_t i = 0; i < stats.input_dim(); ++i) {
        c[i] = stats.sum_xy_pos[i] / n - (stats.sum_x_pos[i] / n) * mean_y;
    }
    const double wc = dot(w, c);
    if (std::abs(wc) <= 1e-12) {
        return out;
    }
    for (std::size_t i = 0; i < stats.input_dim(); ++i) {
        out.a[i] = c[i] / wc;
    }
    out.valid = true;
    return out;
}

bool PatternSet::shapes_match(const Network& net) const {
    return conv_a.rows() == net.num_filters && conv_a.cols() == 2 * net.embed_dim &&
           dense1_a.rows() == net.hidden_dim && dense1_a.cols() == net.num_filters &&
           dense2_a.rows() == 2 && dense2_a.cols() == net.hidden_dim;
}

ModelStats collect_stats(const Network& net, const LabeledDataset& data) {
    ModelStats stats;
    stats.conv = LayerStats(2 * net.embed_dim, net.num_filters);
    stats.dense1 = LayerStats(net.num_filters, net.hidden_dim);
    stats.dense2 = LayerStats(net.hidden_dim, 2);

    std::vector<std::uint8_t> logit_active(2);
    for (const Record& rec : data.records) {
        if (rec.token_ids.size() < 2) {
            continue;
        }
        const ActivationTrace trace = forward(net, rec.token_ids, false);
        const std::size_t e = net.embed_dim;
        const std::size_t f_num = net.num_filters;
        for (std::size_t t = 0; t + 1 < trace.embedded.rows(); ++t) {
            std::span<const double> window{trace.embedded.data() + t * e, 2 * e};
            std::span<const std::uint8_t> active{trace.conv_mask.data() + t * f_num, f_num};
            stats.conv.accumulate(window, trace.conv_pre.row(t), active);
        }
        const Vector pooled = pooled_activations(trace);
        stats.dense1.accumulate(pooled, trace.dense1_pre, trace.dense1_mask);

        Vector hidden(net.hidden_dim);
        for (std::size_t h = 0; h < net.hidden_dim; ++h) {
            hidden[h] = std::max(0.0, trace.dense1_pre[h]);
        }
        logit_active[0] = trace.logits[0] > 0.0 ? 1 : 0;
        logit_active[1] = trace.logits[1] > 0.0 ? 1 : 0;
        stats.dense2.accumulate(hidden, trace.logits, logit_active);
        ++stats.documents;
    }
    return stats;
}

ModelStats merge(const ModelStats& a, const ModelStats& b) {
    ModelStats out;
    out.conv = merge(a.conv, b.conv);
    out.dense1 = merge(a.dense1, b.dense1);
    out.dense2 = merge(a.dense2, b.dense2);
    out.documents = a.documents + b.documents;
    return out;
}

namespace {

void finalize_layer(const LayerStats& stats, const Matrix& weights, bool relu, Matrix& out,
                    std::vector<std::size_t>& dead) {
    out = Matrix(stats.neurons.size(), stats.input_dim);
    dead.clear();
    for (std::size_t j = 0; j < stats.neurons.size(); ++j) {
        const FinalizedPattern fp = relu ? finalize_relu(stats.neurons[j], weights.row(j))
                                         : finalize_linear(stats.neurons[j], weights.row(j));
        std::copy(fp.a.begin(), fp.a.end(), out.row(j).begin());
        if (!fp.valid) {
            dead.push_back(j);
        }
    }
}

}  // namespace

PatternSet finalize_patterns(const ModelStats& stats, const Network& net) {
    if (stats.conv.input_dim != 2 * net.embed_dim || stats.conv.neurons.size() != net.num_filters ||
        stats.dense1.input_dim != net.num_filters || stats.dense1.neurons.size() != net.hidden_dim ||
        stats.dense2.input_dim != net.hidden_dim || stats.dense2.neurons.size() != 2) {
        throw ShapeMismatch("finalize_patterns: statistics shaped for a different network");
    }
    PatternSet ps;
    finalize_layer(stats.conv, net.conv_w, true, ps.conv_a, ps.conv_dead);
    finalize_layer(stats.dense1, net.dense1_w, true, ps.dense1_a, ps.dense1_dead);
    finalize_layer(stats.dense2, net.dense2_w, false, ps.dense2_a, ps.dense2_dead);
    ps.sample_count = stats.documents;
    return ps;
}

PatternSet estimate_patterns(const Network& net, const LabeledDataset& data) {
    return finalize_patterns(collect_stats(net, data), net);
}

}  // namespace patternattr
