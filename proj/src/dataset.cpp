#include "patternattr/dataset.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "patternattr/errors.hpp"

namespace patternattr {

namespace {

bool is_detached_punct(char c) {
    switch (c) {
        case '.': case ',': case ':': case ';': case '?': case '!':
        case '"': case '(': case ')':
            return true;
        default:
            return false;
    }
}

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

bool ends_with_nocase(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < suffix.size(); ++i) {
        if (lower(s[s.size() - suffix.size() + i]) != suffix[i]) {
            return false;
        }
    }
    return true;
}

// Longest suffix first so 'll / 're never match as 'l / 'r leftovers.
const std::array<std::string, 7> kClitics = {"n't", "'ve", "'ll", "'re", "'m", "'s", "'d"};

void append_word_with_clitics(const std::string& word, std::vector<std::string>& out) {
    std::vector<std::string> peeled;
    std::string rest = word;
    while (true) {
        const std::string* hit = nullptr;
        for (const auto& clitic : kClitics) {
            if (rest.size() > clitic.size() && ends_with_nocase(rest, clitic)) {
                hit = &clitic;
                break;
            }
        }
        if (hit == nullptr) {
            break;
        }
        peeled.push_back(rest.substr(rest.size() - hit->size()));
        rest.erase(rest.size() - hit->size());
    }
    out.push_back(rest);
    for (auto it = peeled.rbegin(); it != peeled.rend(); ++it) {
        out.push_back(*it);
    }
}

void append_chunk(const std::string& chunk, std::vector<std::string>& out) {
    std::string word;
    for (char c : chunk) {
        if (is_detached_punct(c)) {
            if (!word.empty()) {
                append_word_with_clitics(word, out);
                word.clear();
            }
            out.emplace_back(1, c);
        } else {
            word += c;
        }
    }
    if (!word.empty()) {
        append_word_with_clitics(word, out);
    }
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        std::size_t start = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
            ++i;
        }
        if (i > start) {
            append_chunk(text.substr(start, i - start), tokens);
        }
    }
    return tokens;
}

int Vocab::id_of(const std::string& token) const {
    auto it = token_to_id.find(token);
    return it == token_to_id.end() ? kUnkId : it->second;
}

int Vocab::size() const {
    int max_id = 0;
    for (const auto& [token, id] : token_to_id) {
        max_id = std::max(max_id, id);
    }
    return max_id + 1;
}

Vocab build_vocab(const std::vector<std::vector<std::string>>& docs, int min_frequency) {
    std::unordered_map<std::string, int> counts;
    for (const auto& doc : docs) {
        for (const auto& token : doc) {
            ++counts[token];
        }
    }
    Vocab vocab;
    int next_id = 1;
    for (const auto& doc : docs) {
        for (const auto& token : doc) {
            if (counts[token] >= min_frequency && vocab.token_to_id.find(token) == vocab.token_to_id.end()) {
                vocab.token_to_id.emplace(token, next_id++);
            }
        }
    }
    return vocab;
}

std::vector<int> ids_for_tokens(const std::vector<std::string>& tokens, const Vocab& vocab) {
    std::vector<int> ids;
    ids.reserve(tokens.size());
    for (const auto& token : tokens) {
        ids.push_back(vocab.id_of(token));
    }
    return ids;
}

namespace {

struct CsvRow {
    std::size_t line = 0;  // 1-based line of the row start
    std::vector<std::string> fields;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        CsvRow row;
        row.line = line;
        bool row_done = false;
        while (!row_done) {
            std::string field;
            if (i < n && text[i] == '"') {
                ++i;
                bool closed = false;
                while (i < n) {
                    if (text[i] == '"') {
                        if (i + 1 < n && text[i + 1] == '"') {
                            field += '"';
                            i += 2;
                        } else {
                            ++i;
                            closed = true;
                            break;
                        }
                    } else {
                        if (text[i] == '\n') {
                            ++line;
                        }
                        field += text[i];
                        ++i;
                    }
                }
                if (!closed) {
                    throw MalformedRow("row starting at line " + std::to_string(row.line) +
                                       ": unterminated quoted field");
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    field += text[i];
                    ++i;
                }
            }
            row.fields.push_back(std::move(field));
            if (i >= n) {
                row_done = true;
            } else if (text[i] == ',') {
                ++i;
            } else if (text[i] == '\r' || text[i] == '\n') {
                if (text[i] == '\r' && i + 1 < n && text[i + 1] == '\n') {
                    ++i;
                }
                ++i;
                ++line;
                row_done = true;
            }
        }
        if (row.fields.size() == 1 && row.fields[0].empty()) {
            continue;  // blank line
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

LabeledDataset load_impl(const std::string& path, const Vocab* reuse) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw FileNotFound("cannot open dataset file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    const std::string text = buffer.str();

    const auto rows = parse_csv(text);
    std::vector<int> labels;
    std::vector<std::vector<std::string>> docs;
    std::size_t row_index = 0;
    for (const auto& row : rows) {
        ++row_index;
        if (row.fields.size() != 3) {
            throw MalformedRow("row " + std::to_string(row_index) + ": expected 3 fields, got " +
                               std::to_string(row.fields.size()));
        }
        const std::string& polarity = row.fields[0];
        int label = 0;
        if (polarity == "1") {
            label = 0;
        } else if (polarity == "2") {
            label = 1;
        } else {
            throw MalformedRow("row " + std::to_string(row_index) + ": polarity must be 1 or 2, got '" +
                               polarity + "'");
        }
        labels.push_back(label);
        docs.push_back(tokenize(row.fields[1] + " : " + row.fields[2]));
    }
    if (docs.empty()) {
        throw EmptyDataset("dataset has no rows: " + path);
    }

    LabeledDataset data;
    data.vocab = reuse != nullptr ? *reuse : build_vocab(docs);
    data.records.reserve(docs.size());
    for (std::size_t r = 0; r < docs.size(); ++r) {
        data.records.push_back({labels[r], ids_for_tokens(docs[r], data.vocab)});
    }
    return data;
}

}  // namespace

LabeledDataset load_dataset(const std::string& path) {
    return load_impl(path, nullptr);
}

LabeledDataset load_dataset(const std::string& path, const Vocab& vocab) {
    return load_impl(path, &vocab);
}

}  // namespace patternattr
