#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "patternattr/dataset.hpp"
#include "patternattr/matrix.hpp"

namespace patternattr {

struct PatternSet;

struct NetworkConfig {
    std::size_t vocab_size = 0;
    std::size_t embed_dim = 64;
    std::size_t num_filters = 150;
    std::size_t hidden_dim = 128;
    double dropout_rate = 0.5;
};

/// Bigram-convolution text classifier:
/// embedding -> conv(width 2) -> ReLU -> max-over-time -> dense -> ReLU ->
/// dropout -> dense(2 logits).
struct Network {
    std::size_t vocab_size = 0;
    std::size_t embed_dim = 0;
    std::size_t num_filters = 0;
    std::size_t hidden_dim = 0;
    double dropout_rate = 0.5;

    Matrix embedding;  // V x E
    Matrix conv_w;     // F x 2E, one bigram filter per row
    Vector conv_b;     // F
    Matrix dense1_w;   // H x F
    Vector dense1_b;   // H
    Matrix dense2_w;   // 2 x H
    Vector dense2_b;   // 2

    /// Fresh network with all parameters drawn uniform(-0.1, 0.1) from seed.
    static Network init(const NetworkConfig& cfg, std::uint64_t seed);
};

/// Per-forward record of everything the pattern estimator and the modified
/// backward pass need: inputs, pre-activations, ReLU masks, pool argmax.
struct ActivationTrace {
    std::vector<int> token_ids;
    Matrix embedded;                        // T x E
    Matrix conv_pre;                        // (T-1) x F
    std::vector<std::uint8_t> conv_mask;    // (T-1) x F row-major, pre > 0
    std::vector<std::size_t> pool_argmax;   // F, lowest maximizing time index
    Vector dense1_pre;                      // H
    std::vector<std::uint8_t> dense1_mask;  // H
    Vector dropout_scale;                   // H, populated only when training
    Vector logits;                          // 2
};

/// Runs the network. Dropout is applied to the hidden layer output only when
/// training is true (rng required then). Evaluation forwards are
/// deterministic and rng-independent.
ActivationTrace forward(const Network& net, std::span<const int> token_ids,
                        bool training = false, std::mt19937_64* rng = nullptr);

/// Same as forward but starting from an already-embedded T x E input; the
/// entry point used for finite-difference gradient checks.
ActivationTrace forward_embedded(const Network& net, Matrix embedded,
                                 bool training = false, std::mt19937_64* rng = nullptr);

/// Post-ReLU max-over-time activations recomputed from a trace.
Vector pooled_activations(const ActivationTrace& trace);

enum class AttributionMode { gradient, pattern_net, pattern_attribution };

/// Backward-pass weight selection: plain weights W for gradient, patterns A
/// for pattern_net, W (.) A elementwise for pattern_attribution. The pattern
/// modes carry the PatternSet to read A from.
struct WeightMode {
    AttributionMode mode = AttributionMode::gradient;
    const PatternSet* patterns = nullptr;

    static WeightMode gradient() { return {AttributionMode::gradient, nullptr}; }
    static WeightMode pattern_net(const PatternSet& p) { return {AttributionMode::pattern_net, &p}; }
    static WeightMode pattern_attribution(const PatternSet& p) {
        return {AttributionMode::pattern_attribution, &p};
    }
};

/// Relevance sums at each backward stage, for layer-wise conservation checks.
struct BackwardAudit {
    double seed = 0.0;
    double hidden_in = 0.0;      // after dense2 backprop, before the hidden ReLU gate
    double hidden_masked = 0.0;  // after the hidden ReLU gate
    double pooled = 0.0;         // after dense1 backprop
    double conv_masked = 0.0;    // after pool routing and the conv ReLU gate
    double embedded = 0.0;       // total relevance on the embedded input
};

/// Backpropagates a seed from the target logit to the embedded input and
/// returns the T x E relevance. Seed is 1 in gradient mode and the target
/// logit value in the pattern modes. ReLU masks from the trace gate all
/// modes; max-pool routes each filter's relevance to its argmax window;
/// biases receive no relevance.
Matrix backward(const Network& net, const ActivationTrace& trace, int target_class,
                const WeightMode& mode, BackwardAudit* audit = nullptr);

struct TrainConfig {
    std::size_t epochs = 5;
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::uint64_t seed = 42;
};

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Adam (beta1=0.9, beta2=0.999, eps=1e-8) on softmax cross-entropy,
/// in place, deterministic given cfg.seed. Records shorter than one bigram
/// window are skipped.
std::vector<EpochStats> train(Network& net, const LabeledDataset& data, const TrainConfig& cfg);

struct BinaryMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Positive-class metrics; precision, recall and f1 fall back to 0 when
/// undefined (no positive predictions / labels).
BinaryMetrics compute_metrics(const std::vector<int>& predicted, const std::vector<int>& gold);

int predict(const Network& net, std::span<const int> token_ids);

BinaryMetrics evaluate(const Network& net, const LabeledDataset& data);

}  // namespace patternattr
