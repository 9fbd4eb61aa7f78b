#pragma once

#include <string>
#include <vector>

#include "patternattr/network.hpp"
#include "patternattr/patterns.hpp"

namespace patternattr {

struct AttributionResult {
    std::vector<std::string> tokens;
    Matrix relevance;    // T x E
    Vector word_scores;  // per-token sum of relevance over embedding dims
    int target_class = 0;
    double logit = 0.0;
    AttributionMode mode = AttributionMode::gradient;
};

struct AttributionTarget {
    bool predicted = true;
    int class_index = 0;

    static AttributionTarget use_predicted() { return {true, 0}; }
    static AttributionTarget use_class(int index) { return {false, index}; }
};

Vector aggregate_word_scores(const Matrix& relevance);

/// Tokenizes the text, runs an evaluation forward, resolves the target class
/// (argmax logit for 'predicted', ties to class 0), runs the mode's backward
/// pass and aggregates word scores. Pattern modes require patterns shaped
/// for the network.
AttributionResult attribute(const Network& net, const Vocab& vocab, const PatternSet* patterns,
                            const std::string& text, AttributionMode mode,
                            const AttributionTarget& target);

struct RenderOptions {
    double gamma = 1.0;  // intensity in (0, 1]
};

/// Standalone HTML page with one span per token. Scores are normalized by
/// the per-document max |score|; the faded channel is
/// c = 255 - round(255 * gamma * r) with round-half-away-from-zero, clamped
/// to [0, 255]. Positive scores render rgb(255,c,c), negative rgb(c,c,255),
/// zero rgb(255,255,255). Output is byte-stable for identical inputs.
std::string render_html(const std::vector<std::string>& tokens, const Vector& word_scores,
                        const RenderOptions& opts = {});

std::string mode_name(AttributionMode mode);
AttributionMode mode_from_name(const std::string& name);

}  // namespace patternattr
