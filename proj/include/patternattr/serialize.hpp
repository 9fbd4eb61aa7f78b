#pragma once

#include <cstdint>
#include <string>

#include "patternattr/attribution.hpp"
#include "patternattr/network.hpp"
#include "patternattr/patterns.hpp"

namespace patternattr {

struct TrainingMeta {
    std::uint64_t seed = 0;
    std::size_t epochs = 0;
    double final_loss = 0.0;
    double final_accuracy = 0.0;
};

struct LoadedModel {
    Network net;
    Vocab vocab;
    TrainingMeta meta;
    std::string file_hash;  // SHA-256 hex digest of the file bytes
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

/// Versioned JSON model file (format_version 1). Numbers are written as
/// shortest round-trip decimals, so load(save(net)) reproduces every
/// parameter bit-exactly, and identical inputs produce identical bytes.
void save_model(const std::string& path, const Network& net, const Vocab& vocab,
                const TrainingMeta& meta);
LoadedModel load_model(const std::string& path);

/// Pattern files bind to the model they were estimated from via the model
/// file's content hash; loading against a different model raises
/// HashMismatch. Pass an empty expected hash to skip the check.
void save_patterns(const std::string& path, const PatternSet& patterns,
                   const std::string& model_hash);
PatternSet load_patterns(const std::string& path, const std::string& expected_model_hash);

/// {tokens, scores, target_class, logit, mode}; the relevance matrix itself
/// is not persisted.
void save_attribution_json(const std::string& path, const AttributionResult& result);
AttributionResult load_attribution_json(const std::string& path);

}  // namespace patternattr
