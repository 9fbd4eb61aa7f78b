#include "patternattr/attribution.hpp"

#include <cmath>
#include <sstream>

#include "patternattr/errors.hpp"

namespace patternattr {

Vector aggregate_word_scores(const Matrix& relevance) {
    Vector scores(relevance.rows(), 0.0);
    for (std::size_t t = 0; t < relevance.rows(); ++t) {
        double s = 0.0;
        for (double v : relevance.row(t)) {
            s += v;
        }
        scores[t] = s;
    }
    return scores;
}

AttributionResult attribute(const Network& net, const Vocab& vocab, const PatternSet* patterns,
                            const std::string& text, AttributionMode mode,
                            const AttributionTarget& target) {
    AttributionResult result;
    result.tokens = tokenize(text);
    if (result.tokens.size() < 2) {
        throw SequenceTooShort("attribute: need at least 2 tokens");
    }
    const std::vector<int> ids = ids_for_tokens(result.tokens, vocab);
    const ActivationTrace trace = forward(net, ids, false);

    int cls;
    if (target.predicted) {
        cls = trace.logits[1] > trace.logits[0] ? 1 : 0;
    } else {
        if (target.class_index < 0 || target.class_index > 1) {
            throw BadConfig("attribute: target class must be 0 or 1");
        }
        cls = target.class_index;
    }

    WeightMode wm;
    wm.mode = mode;
    if (mode != AttributionMode::gradient) {
        if (patterns == nullptr) {
            throw ShapeMismatch("attribute: pattern mode requires a pattern set");
        }
        wm.patterns = patterns;
    }

    result.relevance = backward(net, trace, cls, wm);
    result.word_scores = aggregate_word_scores(result.relevance);
    result.target_class = cls;
    result.logit = trace.logits[static_cast<std::size_t>(cls)];
    result.mode = mode;
    return result;
}

namespace {

void append_escaped(std::ostringstream& out, const std::string& token) {
    for (char c : token) {
        switch (c) {
            case '&': out << "&amp;"; break;
            case '<': out << "&lt;"; break;
            case '>': out << "&gt;"; break;
            default: out << c;
        }
    }
}

}  // namespace

std::string render_html(const std::vector<std::string>& tokens, const Vector& word_scores,
                        const RenderOptions& opts) {
    if (tokens.size() != word_scores.size()) {
        throw DimensionMismatch("render_html: token and score counts differ");
    }
    if (!(opts.gamma > 0.0 && opts.gamma <= 1.0)) {
        throw BadConfig("render_html: gamma must be in (0, 1]");
    }
    double max_abs = 0.0;
    for (double s : word_scores) {
        max_abs = std::max(max_abs, std::abs(s));
    }

    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
        << "<title>word attribution</title>\n</head>\n<body>\n"
        << "<p style=\"font-family: sans-serif; line-height: 1.8;\">";
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (t > 0) {
            out << ' ';
        }
        const double score = word_scores[t];
        const double r = max_abs > 0.0 ? std::abs(score) / max_abs : 0.0;
        long channel = 255 - std::lround(255.0 * opts.gamma * r);
        channel = std::min(255L, std::max(0L, channel));
        int red = 255, green = 255, blue = 255;
        if (score > 0.0) {
            green = blue = static_cast<int>(channel);
        } else if (score < 0.0) {
            red = green = static_cast<int>(channel);
        }
        out << "<span style=\"background-color: rgb(" << red << ',' << green << ',' << blue
            << ")\">";
        append_escaped(out, tokens[t]);
        out << "</span>";
    }
    out << "</p>\n</body>\n</html>\n";
    return out.str();
}

std::string mode_name(AttributionMode mode) {
    switch (mode) {
        case AttributionMode::gradient: return "gradient";
        case AttributionMode::pattern_net: return "patternnet";
        case AttributionMode::pattern_attribution: return "patternattribution";
    }
    return "gradient";
}

AttributionMode mode_from_name(const std::string& name) {
    if (name == "gradient") {
        return AttributionMode::gradient;
    }
    if (name == "patternnet") {
        return AttributionMode::pattern_net;
    }
    if (name == "patternattribution") {
        return AttributionMode::pattern_attribution;
    }
    throw BadConfig("unknown attribution mode: " + name);
}

}  // namespace patternattr
