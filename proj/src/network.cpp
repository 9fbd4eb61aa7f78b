#include "patternattr/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patternattr/errors.hpp"
#include "patternattr/patterns.hpp"

namespace patternattr {

Network Network::init(const NetworkConfig& cfg, std::uint64_t seed) {
    if (cfg.vocab_size == 0 || cfg.embed_dim == 0 || cfg.num_filters == 0 || cfg.hidden_dim == 0) {
        throw BadConfig("Network::init: all dimensions must be positive");
    }
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0)) {
        throw BadConfig("Network::init: dropout_rate must be in [0, 1)");
    }
    Network net;
    net.vocab_size = cfg.vocab_size;
    net.embed_dim = cfg.embed_dim;
    net.num_filters = cfg.num_filters;
    net.hidden_dim = cfg.hidden_dim;
    net.dropout_rate = cfg.dropout_rate;
    net.embedding = Matrix(cfg.vocab_size, cfg.embed_dim);
    net.conv_w = Matrix(cfg.num_filters, 2 * cfg.embed_dim);
    net.conv_b = Vector(cfg.num_filters, 0.0);
    net.dense1_w = Matrix(cfg.hidden_dim, cfg.num_filters);
    net.dense1_b = Vector(cfg.hidden_dim, 0.0);
    net.dense2_w = Matrix(2, cfg.hidden_dim);
    net.dense2_b = Vector(2, 0.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-0.1, 0.1);
    auto fill = [&](auto& container) {
        for (double& v : container) {
            v = uniform(rng);
        }
    };
    fill(net.embedding.values());
    fill(net.conv_w.values());
    fill(net.conv_b);
    fill(net.dense1_w.values());
    fill(net.dense1_b);
    fill(net.dense2_w.values());
    fill(net.dense2_b);
    return net;
}

ActivationTrace forward(const Network& net, std::span<const int> token_ids, bool training,
                        std::mt19937_64* rng) {
    if (token_ids.size() < 2) {
        throw SequenceTooShort("forward: need at least 2 tokens for one bigram window");
    }
    Matrix embedded(token_ids.size(), net.embed_dim);
    for (std::size_t t = 0; t < token_ids.size(); ++t) {
        const int id = token_ids[t];
        if (id < 0 || static_cast<std::size_t>(id) >= net.vocab_size) {
            throw UnknownTokenId("forward: token id " + std::to_string(id) + " outside vocabulary");
        }
        auto src = net.embedding.row(static_cast<std::size_t>(id));
        std::copy(src.begin(), src.end(), embedded.row(t).begin());
    }
    ActivationTrace trace = forward_embedded(net, std::move(embedded), training, rng);
    trace.token_ids.assign(token_ids.begin(), token_ids.end());
    return trace;
}

ActivationTrace forward_embedded(const Network& net, Matrix embedded, bool training,
                                 std::mt19937_64* rng) {
    const std::size_t t_len = embedded.rows();
    if (t_len < 2) {
        throw SequenceTooShort("forward_embedded: need at least 2 positions");
    }
    if (embedded.cols() != net.embed_dim) {
        throw ShapeMismatch("forward_embedded: embedding width mismatch");
    }
    const std::size_t e = net.embed_dim;
    const std::size_t f_num = net.num_filters;
    const std::size_t h_num = net.hidden_dim;

    ActivationTrace trace;
    trace.embedded = std::move(embedded);
    trace.conv_pre = Matrix(t_len - 1, f_num);
    trace.conv_mask.assign((t_len - 1) * f_num, 0);
    for (std::size_t t = 0; t + 1 < t_len; ++t) {
        std::span<const double> window{trace.embedded.data() + t * e, 2 * e};
        auto pre = trace.conv_pre.row(t);
        for (std::size_t f = 0; f < f_num; ++f) {
            const double z = dot(net.conv_w.row(f), window) + net.conv_b[f];
            pre[f] = z;
            trace.conv_mask[t * f_num + f] = z > 0.0 ? 1 : 0;
        }
    }

    trace.pool_argmax.assign(f_num, 0);
    Vector pooled(f_num, 0.0);
    for (std::size_t f = 0; f < f_num; ++f) {
        double best = std::max(0.0, trace.conv_pre(0, f));
        std::size_t best_t = 0;
        for (std::size_t t = 1; t + 1 < t_len; ++t) {
            const double v = std::max(0.0, trace.conv_pre(t, f));
            if (v > best) {
                best = v;
                best_t = t;
            }
        }
        pooled[f] = best;
        trace.pool_argmax[f] = best_t;
    }

    trace.dense1_pre.resize(h_num);
    trace.dense1_mask.assign(h_num, 0);
    Vector hidden(h_num);
    for (std::size_t h = 0; h < h_num; ++h) {
        const double z = dot(net.dense1_w.row(h), pooled) + net.dense1_b[h];
        trace.dense1_pre[h] = z;
        trace.dense1_mask[h] = z > 0.0 ? 1 : 0;
        hidden[h] = std::max(0.0, z);
    }

    if (training && net.dropout_rate > 0.0) {
        if (rng == nullptr) {
            throw BadConfig("forward: training with dropout needs an rng");
        }
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        const double keep_scale = 1.0 / (1.0 - net.dropout_rate);
        trace.dropout_scale.resize(h_num);
        for (std::size_t h = 0; h < h_num; ++h) {
            const double scale = uniform(*rng) < net.dropout_rate ? 0.0 : keep_scale;
            trace.dropout_scale[h] = scale;
            hidden[h] *= scale;
        }
    }

    trace.logits.resize(2);
    for (std::size_t c = 0; c < 2; ++c) {
        trace.logits[c] = dot(net.dense2_w.row(c), hidden) + net.dense2_b[c];
    }
    return trace;
}

Vector pooled_activations(const ActivationTrace& trace) {
    const std::size_t f_num = trace.pool_argmax.size();
    Vector pooled(f_num);
    for (std::size_t f = 0; f < f_num; ++f) {
        pooled[f] = std::max(0.0, trace.conv_pre(trace.pool_argmax[f], f));
    }
    return pooled;
}

namespace {

double effective_weight(AttributionMode mode, double w, double a) {
    switch (mode) {
        case AttributionMode::gradient: return w;
        case AttributionMode::pattern_net: return a;
        case AttributionMode::pattern_attribution: return w * a;
    }
    return w;
}

}  // namespace

Matrix backward(const Network& net, const ActivationTrace& trace, int target_class,
                const WeightMode& mode, BackwardAudit* audit) {
    if (target_class < 0 || target_class > 1) {
        throw BadConfig("backward: target class must be 0 or 1");
    }
    const bool needs_patterns = mode.mode != AttributionMode::gradient;
    if (needs_patterns) {
        if (mode.patterns == nullptr || !mode.patterns->shapes_match(net)) {
            throw ShapeMismatch("backward: pattern set missing or shaped for a different network");
        }
    }
    const PatternSet* ps = mode.patterns;
    const std::size_t e = net.embed_dim;
    const std::size_t f_num = net.num_filters;
    const std::size_t h_num = net.hidden_dim;
    const std::size_t t_len = trace.embedded.rows();
    const std::size_t tc = static_cast<std::size_t>(target_class);

    const double seed = mode.mode == AttributionMode::gradient ? 1.0 : trace.logits[tc];

    Vector r_hidden(h_num);
    double hidden_in = 0.0;
    for (std::size_t h = 0; h < h_num; ++h) {
        const double a = needs_patterns ? ps->dense2_a(tc, h) : 0.0;
        r_hidden[h] = seed * effective_weight(mode.mode, net.dense2_w(tc, h), a);
        hidden_in += r_hidden[h];
    }

    double hidden_masked = 0.0;
    for (std::size_t h = 0; h < h_num; ++h) {
        if (!trace.dense1_mask[h]) {
            r_hidden[h] = 0.0;
        }
        hidden_masked += r_hidden[h];
    }

    Vector r_pooled(f_num, 0.0);
    for (std::size_t h = 0; h < h_num; ++h) {
        if (r_hidden[h] == 0.0) {
            continue;
        }
        for (std::size_t f = 0; f < f_num; ++f) {
            const double a = needs_patterns ? ps->dense1_a(h, f) : 0.0;
            r_pooled[f] += r_hidden[h] * effective_weight(mode.mode, net.dense1_w(h, f), a);
        }
    }

    Matrix relevance(t_len, e, 0.0);
    double conv_masked = 0.0;
    for (std::size_t f = 0; f < f_num; ++f) {
        const std::size_t t = trace.pool_argmax[f];
        if (!trace.conv_mask[t * f_num + f]) {
            continue;
        }
        const double r = r_pooled[f];
        conv_masked += r;
        auto first = relevance.row(t);
        auto second = relevance.row(t + 1);
        for (std::size_t j = 0; j < e; ++j) {
            const double a0 = needs_patterns ? ps->conv_a(f, j) : 0.0;
            const double a1 = needs_patterns ? ps->conv_a(f, e + j) : 0.0;
            first[j] += r * effective_weight(mode.mode, net.conv_w(f, j), a0);
            second[j] += r * effective_weight(mode.mode, net.conv_w(f, e + j), a1);
        }
    }

    if (audit != nullptr) {
        audit->seed = seed;
        audit->hidden_in = hidden_in;
        audit->hidden_masked = hidden_masked;
        audit->pooled = std::accumulate(r_pooled.begin(), r_pooled.end(), 0.0);
        audit->conv_masked = conv_masked;
        audit->embedded = std::accumulate(relevance.values().begin(), relevance.values().end(), 0.0);
    }
    return relevance;
}

namespace {

struct ParamSlot {
    double* param = nullptr;
    std::size_t n = 0;
    Vector grad, m, v;

    explicit ParamSlot(double* p, std::size_t count)
        : param(p), n(count), grad(count, 0.0), m(count, 0.0), v(count, 0.0) {}

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

struct AdamOptimizer {
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    std::vector<ParamSlot> slots;
    std::size_t step_count = 0;

    explicit AdamOptimizer(Network& net) {
        slots.emplace_back(net.embedding.data(), net.embedding.size());
        slots.emplace_back(net.conv_w.data(), net.conv_w.size());
        slots.emplace_back(net.conv_b.data(), net.conv_b.size());
        slots.emplace_back(net.dense1_w.data(), net.dense1_w.size());
        slots.emplace_back(net.dense1_b.data(), net.dense1_b.size());
        slots.emplace_back(net.dense2_w.data(), net.dense2_w.size());
        slots.emplace_back(net.dense2_b.data(), net.dense2_b.size());
    }

    void zero_grads() {
        for (auto& slot : slots) {
            slot.zero_grad();
        }
    }

    void step(double lr, double grad_scale) {
        ++step_count;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_count));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_count));
        for (auto& slot : slots) {
            for (std::size_t i = 0; i < slot.n; ++i) {
                const double g = slot.grad[i] * grad_scale;
                slot.m[i] = kBeta1 * slot.m[i] + (1.0 - kBeta1) * g;
                slot.v[i] = kBeta2 * slot.v[i] + (1.0 - kBeta2) * g * g;
                const double m_hat = slot.m[i] / bc1;
                const double v_hat = slot.v[i] / bc2;
                slot.param[i] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
            }
        }
    }
};

// Indices into AdamOptimizer::slots.
enum SlotIndex { kEmbedding = 0, kConvW, kConvB, kDense1W, kDense1B, kDense2W, kDense2B };

double softmax_xent_grad(const Vector& logits, int label, Vector& dlogits) {
    const double mx = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - mx);
    const double e1 = std::exp(logits[1] - mx);
    const double z = e0 + e1;
    const double p0 = e0 / z;
    const double p1 = e1 / z;
    dlogits = {p0, p1};
    dlogits[static_cast<std::size_t>(label)] -= 1.0;
    return -std::log(label == 0 ? p0 : p1);
}

// Accumulates gradients of the cross-entropy loss of one traced training
// forward into the optimizer slots.
void accumulate_gradients(const Network& net, const ActivationTrace& trace, int label,
                          AdamOptimizer& opt) {
    const std::size_t e = net.embed_dim;
    const std::size_t f_num = net.num_filters;
    const std::size_t h_num = net.hidden_dim;
    const std::size_t t_len = trace.embedded.rows();

    Vector dlogits;
    softmax_xent_grad(trace.logits, label, dlogits);

    const Vector pooled = pooled_activations(trace);
    Vector hidden_dropped(h_num);
    for (std::size_t h = 0; h < h_num; ++h) {
        double v = std::max(0.0, trace.dense1_pre[h]);
        if (!trace.dropout_scale.empty()) {
            v *= trace.dropout_scale[h];
        }
        hidden_dropped[h] = v;
    }

    auto& g_dense2_w = opt.slots[kDense2W].grad;
    auto& g_dense2_b = opt.slots[kDense2B].grad;
    Vector d_hidden(h_num, 0.0);
    for (std::size_t c = 0; c < 2; ++c) {
        g_dense2_b[c] += dlogits[c];
        for (std::size_t h = 0; h < h_num; ++h) {
            g_dense2_w[c * h_num + h] += dlogits[c] * hidden_dropped[h];
            d_hidden[h] += dlogits[c] * net.dense2_w(c, h);
        }
    }

    auto& g_dense1_w = opt.slots[kDense1W].grad;
    auto& g_dense1_b = opt.slots[kDense1B].grad;
    Vector d_pooled(f_num, 0.0);
    for (std::size_t h = 0; h < h_num; ++h) {
        double dz = d_hidden[h];
        if (!trace.dropout_scale.empty()) {
            dz *= trace.dropout_scale[h];
        }
        if (!trace.dense1_mask[h]) {
            continue;
        }
        g_dense1_b[h] += dz;
        for (std::size_t f = 0; f < f_num; ++f) {
            g_dense1_w[h * f_num + f] += dz * pooled[f];
            d_pooled[f] += dz * net.dense1_w(h, f);
        }
    }

    auto& g_conv_w = opt.slots[kConvW].grad;
    auto& g_conv_b = opt.slots[kConvB].grad;
    auto& g_embedding = opt.slots[kEmbedding].grad;
    for (std::size_t f = 0; f < f_num; ++f) {
        const std::size_t t = trace.pool_argmax[f];
        if (!trace.conv_mask[t * f_num + f]) {
            continue;
        }
        const double dz = d_pooled[f];
        g_conv_b[f] += dz;
        std::span<const double> window{trace.embedded.data() + t * e, 2 * e};
        for (std::size_t j = 0; j < 2 * e; ++j) {
            g_conv_w[f * 2 * e + j] += dz * window[j];
        }
        const std::size_t id_first = static_cast<std::size_t>(trace.token_ids[t]);
        const std::size_t id_second = static_cast<std::size_t>(trace.token_ids[t + 1]);
        for (std::size_t j = 0; j < e; ++j) {
            g_embedding[id_first * e + j] += dz * net.conv_w(f, j);
            g_embedding[id_second * e + j] += dz * net.conv_w(f, e + j);
        }
    }
    (void)t_len;
}

}  // namespace

std::vector<EpochStats> train(Network& net, const LabeledDataset& data, const TrainConfig& cfg) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < data.records.size(); ++i) {
        if (data.records[i].token_ids.size() >= 2) {
            usable.push_back(i);
        }
    }
    if (usable.empty()) {
        throw EmptyDataset("train: no records with at least 2 tokens");
    }
    const std::size_t batch_size = std::max<std::size_t>(1, cfg.batch_size);

    AdamOptimizer opt(net);
    std::mt19937_64 rng(cfg.seed);
    std::vector<EpochStats> history;
    history.reserve(cfg.epochs);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(usable.begin(), usable.end(), rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < usable.size(); start += batch_size) {
            const std::size_t end = std::min(start + batch_size, usable.size());
            opt.zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const Record& rec = data.records[usable[i]];
                const ActivationTrace trace = forward(net, rec.token_ids, true, &rng);
                Vector dlogits;
                loss_sum += softmax_xent_grad(trace.logits, rec.label, dlogits);
                accumulate_gradients(net, trace, rec.label, opt);
            }
            const std::size_t batch_n = end - start;
            seen += batch_n;
            opt.step(cfg.learning_rate, 1.0 / static_cast<double>(batch_n));
        }

        std::size_t correct = 0;
        for (std::size_t i : usable) {
            if (predict(net, data.records[i].token_ids) == data.records[i].label) {
                ++correct;
            }
        }
        history.push_back({loss_sum / static_cast<double>(seen),
                           static_cast<double>(correct) / static_cast<double>(usable.size())});
    }
    return history;
}

BinaryMetrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& gold) {
    if (predicted.size() != gold.size()) {
        throw DimensionMismatch("compute_metrics: length mismatch");
    }
    if (predicted.empty()) {
        throw EmptyDataset("compute_metrics: no samples");
    }
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == 1) {
            gold[i] == 1 ? ++tp : ++fp;
        } else {
            gold[i] == 1 ? ++fn : ++tn;
        }
    }
    BinaryMetrics m;
    m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(predicted.size());
    m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    return m;
}

int predict(const Network& net, std::span<const int> token_ids) {
    const ActivationTrace trace = forward(net, token_ids, false);
    return trace.logits[1] > trace.logits[0] ? 1 : 0;
}

BinaryMetrics evaluate(const Network& net, const LabeledDataset& data) {
    std::vector<int> predicted;
    std::vector<int> gold;
    for (const Record& rec : data.records) {
        if (rec.token_ids.size() < 2) {
            continue;
        }
        predicted.push_back(predict(net, rec.token_ids));
        gold.push_back(rec.label);
    }
    if (predicted.empty()) {
        throw EmptyDataset("evaluate: no scorable records");
    }
    return compute_metrics(predicted, gold);
}

}  // namespace patternattr
