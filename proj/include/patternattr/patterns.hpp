#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "patternattr/matrix.hpp"
#include "patternattr/network.hpp"

namespace patternattr {

/// Running sums for one neuron y = w^T x (+ bias): full-batch moments plus
/// the positive-regime (pre-activation > 0) moments used for ReLU patterns.
/// Merging two instances adds every field, so estimation can be sharded and
/// reduced.
struct NeuronStats {
    std::size_t n_all = 0;
    std::size_t n_pos = 0;
    Vector sum_x_all, sum_x_pos;
    double sum_y_all = 0.0, sum_y_pos = 0.0;
    Vector sum_xy_all, sum_xy_pos;
    double sum_yy_all = 0.0;

    explicit NeuronStats(std::size_t input_dim = 0);
    std::size_t input_dim() const { return sum_x_all.size(); }
};

NeuronStats merge(const NeuronStats& a, const NeuronStats& b);

/// Statistics for every neuron of one layer; the neurons share each input x
/// but keep their own regime counts.
struct LayerStats {
    std::size_t input_dim = 0;
    std::vector<NeuronStats> neurons;

    LayerStats() = default;
    LayerStats(std::size_t input_dim, std::size_t num_neurons);

    /// One sample: shared input x, per-neuron pre-activation z and regime
    /// flag (z > 0).
    void accumulate(std::span<const double> x, std::span<const double> z,
                    std::span<const std::uint8_t> active);
};

LayerStats merge(const LayerStats& a, const LayerStats& b);

struct FinalizedPattern {
    Vector a;
    bool valid = false;
};

/// Linear-layer signal base vector a = cov(x, y) / var(y) over all samples
/// (population moments). Degenerate output variance (var <= 1e-12) yields an
/// invalid, all-zero pattern. For y = w^T x + b this satisfies w^T a = 1.
FinalizedPattern finalize_linear(const NeuronStats& stats, std::span<const double> w);

/// ReLU-layer signal base vector from positive-regime moments:
/// c = E+[x y] - E+[x] E+[y], a = c / (w^T c). The w^T c normalization pins
/// w^T a = 1 exactly, which the relevance-conserving backward pass relies
/// on, and coincides with cov/var when y is exactly linear in x. Neurons
/// with fewer than 2 active samples or |w^T c| <= 1e-12 come back invalid
/// (dead) with a zero pattern.
FinalizedPattern finalize_relu(const NeuronStats& stats, std::span<const double> w);

/// Per-layer signal base vectors for a network; row i is neuron i's pattern.
/// Invalid neurons have zero rows and are listed in the dead vectors.
struct PatternSet {
    Matrix conv_a;    // F x 2E
    Matrix dense1_a;  // H x F
    Matrix dense2_a;  // 2 x H
    std::vector<std::size_t> conv_dead, dense1_dead, dense2_dead;
    std::size_t sample_count = 0;  // documents the statistics were taken from

    bool shapes_match(const Network& net) const;
};

struct ModelStats {
    LayerStats conv;    // every bigram window is one sample per filter
    LayerStats dense1;
    LayerStats dense2;
    std::size_t documents = 0;
};

/// Runs evaluation-mode forwards over the dataset and accumulates layer
/// statistics. Conv filters share one pattern across time positions, so each
/// window contributes one sample. Records shorter than one window are
/// skipped.
ModelStats collect_stats(const Network& net, const LabeledDataset& data);

ModelStats merge(const ModelStats& a, const ModelStats& b);

/// conv and dense1 feed ReLUs and use the positive-regime estimator; dense2
/// outputs raw logits and uses the linear one.
PatternSet finalize_patterns(const ModelStats& stats, const Network& net);

PatternSet estimate_patterns(const Network& net, const LabeledDataset& data);

}  // namespace patternattr
