#pragma once

#include <cstdint>
#include <vector>

#include "patternattr/matrix.hpp"
#include "patternattr/network.hpp"
#include "patternattr/patterns.hpp"

namespace patternattr::testing {

/// Maximizes |pearson(D v, y)| over unit vectors v by nested angular grid
/// refinement. Supports K in {1, 2, 3}; independent of the ridge solver.
double best_unit_correlation(const Matrix& d, const Vector& y);

/// Central-difference gradient of the target logit with respect to the
/// embedded input.
Matrix finite_difference_gradient(const Network& net, const Matrix& embedded, int target_class,
                                  double step);

/// True when every pre-activation is at least margin away from the ReLU kink
/// and every filter's pooling maximum wins by at least margin, so central
/// differences stay on one linear piece.
bool trace_kink_safe(const ActivationTrace& trace, double margin);

struct ConservationCase {
    Network net;
    PatternSet patterns;
    std::vector<int> token_ids;
};

/// Random model/pattern/document triple with strictly positive parameters
/// (every ReLU active on the document) and patterns normalized to
/// w^T a = 1 per neuron.
ConservationCase make_conservation_case(std::uint64_t seed);

}  // namespace patternattr::testing
