#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace patternattr {

inline constexpr int kUnkId = 0;

/// Whitespace tokenizer that detaches . , : ; ? ! " ( ) as standalone tokens
/// and splits the English clitics 've 'm 's 'd 'll 're n't off their host
/// word. Case is preserved.
std::vector<std::string> tokenize(const std::string& text);

/// Token to id map. Id 0 is reserved for unknown tokens and is not stored.
struct Vocab {
    std::unordered_map<std::string, int> token_to_id;

    int id_of(const std::string& token) const;
    /// Highest id + 1, i.e. the embedding table size.
    int size() const;
};

/// Assigns ids (from 1, in first-appearance order) to tokens that occur at
/// least min_frequency times across the documents.
Vocab build_vocab(const std::vector<std::vector<std::string>>& docs, int min_frequency = 2);

struct Record {
    int label = 0;  // 0 negative, 1 positive
    std::vector<int> token_ids;
};

struct LabeledDataset {
    std::vector<Record> records;
    Vocab vocab;
};

/// Reads a headerless CSV of (polarity in {1,2}, title, body) rows with
/// double-quote quoting and doubled-quote escaping. Each document is
/// tokenize(title + " : " + body); polarity 1 maps to negative, 2 to
/// positive. The first overload builds the vocabulary from the file
/// (min frequency 2); the second reuses an existing one.
LabeledDataset load_dataset(const std::string& path);
LabeledDataset load_dataset(const std::string& path, const Vocab& vocab);

std::vector<int> ids_for_tokens(const std::vector<std::string>& tokens, const Vocab& vocab);

}  // namespace patternattr
