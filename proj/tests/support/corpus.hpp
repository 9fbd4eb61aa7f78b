#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace patternattr::testing {

struct ToyDoc {
    int label = 0;  // 0 negative, 1 positive
    std::string title, body;
};

struct ToyCorpus {
    std::vector<ToyDoc> docs;
};

const std::vector<std::string>& positive_words();
const std::vector<std::string>& negative_words();
const std::vector<std::string>& stop_words();
const std::vector<std::string>& neutral_words();

/// Balanced review corpus with class-specific sentiment bigrams
/// ("<adjective> <noun>") planted into stop/neutral filler. Deterministic
/// for a given seed.
ToyCorpus make_toy_corpus(std::size_t num_docs, std::uint64_t seed);

/// The document exactly as the dataset loader composes it.
std::string doc_text(const ToyDoc& doc);

void write_corpus_csv(const ToyCorpus& corpus, const std::string& path);

}  // namespace patternattr::testing
