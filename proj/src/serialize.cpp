#include "patternattr/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include <json.hpp>

#include "patternattr/errors.hpp"

namespace patternattr {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw FileNotFound("cannot open file: " + path);
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw Error("cannot write file: " + path);
    }
    file << bytes;
}

json parse_json(const std::string& bytes, const std::string& path) {
    json j = json::parse(bytes, nullptr, false);
    if (j.is_discarded()) {
        throw CorruptFile("not valid JSON: " + path);
    }
    return j;
}

void check_version(const json& j, const std::string& path) {
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw CorruptFile("missing format_version: " + path);
    }
    const int version = j["format_version"].get<int>();
    if (version != kFormatVersion) {
        throw UnsupportedVersion("unsupported format_version " + std::to_string(version) + ": " +
                                 path);
    }
}

json tensor_to_json(const std::vector<std::size_t>& shape, const double* data, std::size_t n) {
    json t;
    t["shape"] = shape;
    t["data"] = std::vector<double>(data, data + n);
    return t;
}

std::vector<double> tensor_from_json(const json& t, const std::vector<std::size_t>& expected_shape,
                                     const std::string& name) {
    if (!t.is_object() || !t.contains("shape") || !t.contains("data") || !t["data"].is_array()) {
        throw CorruptFile("tensor '" + name + "' malformed");
    }
    const auto shape = t["shape"].get<std::vector<std::size_t>>();
    std::size_t product = 1;
    for (std::size_t s : shape) {
        product *= s;
    }
    if (shape != expected_shape) {
        throw CorruptFile("tensor '" + name + "' has unexpected shape");
    }
    if (t["data"].size() != product) {
        throw CorruptFile("tensor '" + name + "' data length does not match its shape");
    }
    std::vector<double> data;
    data.reserve(product);
    for (const auto& v : t["data"]) {
        if (!v.is_number()) {
            throw CorruptFile("tensor '" + name + "' holds a non-numeric entry");
        }
        const double x = v.get<double>();
        if (!std::isfinite(x)) {
            throw CorruptFile("tensor '" + name + "' holds a non-finite entry");
        }
        data.push_back(x);
    }
    return data;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::string& path) {
    return sha256_hex(read_file(path));
}

void save_model(const std::string& path, const Network& net, const Vocab& vocab,
                const TrainingMeta& meta) {
    json j;
    j["format_version"] = kFormatVersion;
    j["architecture"] = {{"vocab_size", net.vocab_size},
                         {"embed_dim", net.embed_dim},
                         {"num_filters", net.num_filters},
                         {"hidden_dim", net.hidden_dim},
                         {"filter_width", 2},
                         {"dropout_rate", net.dropout_rate}};
    json params;
    params["embedding"] = tensor_to_json({net.vocab_size, net.embed_dim}, net.embedding.data(),
                                         net.embedding.size());
    params["conv_w"] =
        tensor_to_json({net.num_filters, 2 * net.embed_dim}, net.conv_w.data(), net.conv_w.size());
    params["conv_b"] = tensor_to_json({net.num_filters}, net.conv_b.data(), net.conv_b.size());
    params["dense1_w"] = tensor_to_json({net.hidden_dim, net.num_filters}, net.dense1_w.data(),
                                        net.dense1_w.size());
    params["dense1_b"] = tensor_to_json({net.hidden_dim}, net.dense1_b.data(), net.dense1_b.size());
    params["dense2_w"] =
        tensor_to_json({2, net.hidden_dim}, net.dense2_w.data(), net.dense2_w.size());
    params["dense2_b"] = tensor_to_json({2}, net.dense2_b.data(), net.dense2_b.size());
    j["parameters"] = std::move(params);

    json vocab_json = json::object();
    for (const auto& [token, id] : vocab.token_to_id) {
        vocab_json[token] = id;
    }
    j["vocab"] = std::move(vocab_json);
    j["training_meta"] = {{"seed", meta.seed},
                          {"epochs", meta.epochs},
                          {"metrics", {{"final_loss", meta.final_loss},
                                       {"final_accuracy", meta.final_accuracy}}}};
    write_file(path, j.dump());
}

LoadedModel load_model(const std::string& path) {
    const std::string bytes = read_file(path);
    const json j = parse_json(bytes, path);
    check_version(j, path);
    try {
        const json& arch = j.at("architecture");
        NetworkConfig cfg;
        cfg.vocab_size = arch.at("vocab_size").get<std::size_t>();
        cfg.embed_dim = arch.at("embed_dim").get<std::size_t>();
        cfg.num_filters = arch.at("num_filters").get<std::size_t>();
        cfg.hidden_dim = arch.at("hidden_dim").get<std::size_t>();
        cfg.dropout_rate = arch.at("dropout_rate").get<double>();
        if (arch.at("filter_width").get<int>() != 2) {
            throw CorruptFile("unsupported filter width in " + path);
        }

        LoadedModel model;
        model.net.vocab_size = cfg.vocab_size;
        model.net.embed_dim = cfg.embed_dim;
        model.net.num_filters = cfg.num_filters;
        model.net.hidden_dim = cfg.hidden_dim;
        model.net.dropout_rate = cfg.dropout_rate;

        const json& params = j.at("parameters");
        auto load_matrix = [&](const char* name, std::size_t r, std::size_t c, Matrix& out) {
            out = Matrix(r, c);
            out.values() = tensor_from_json(params.at(name), {r, c}, name);
        };
        auto load_vector = [&](const char* name, std::size_t n, Vector& out) {
            out = tensor_from_json(params.at(name), {n}, name);
        };
        load_matrix("embedding", cfg.vocab_size, cfg.embed_dim, model.net.embedding);
        load_matrix("conv_w", cfg.num_filters, 2 * cfg.embed_dim, model.net.conv_w);
        load_vector("conv_b", cfg.num_filters, model.net.conv_b);
        load_matrix("dense1_w", cfg.hidden_dim, cfg.num_filters, model.net.dense1_w);
        load_vector("dense1_b", cfg.hidden_dim, model.net.dense1_b);
        load_matrix("dense2_w", 2, cfg.hidden_dim, model.net.dense2_w);
        load_vector("dense2_b", 2, model.net.dense2_b);

        for (const auto& [token, id] : j.at("vocab").items()) {
            const int token_id = id.get<int>();
            if (token_id < 1 || static_cast<std::size_t>(token_id) >= cfg.vocab_size) {
                throw CorruptFile("vocab id out of range in " + path);
            }
            model.vocab.token_to_id.emplace(token, token_id);
        }

        const json& meta = j.at("training_meta");
        model.meta.seed = meta.at("seed").get<std::uint64_t>();
        model.meta.epochs = meta.at("epochs").get<std::size_t>();
        model.meta.final_loss = meta.at("metrics").at("final_loss").get<double>();
        model.meta.final_accuracy = meta.at("metrics").at("final_accuracy").get<double>();
        model.file_hash = sha256_hex(bytes);
        return model;
    } catch (const json::exception& e) {
        throw CorruptFile("model file " + path + ": " + e.what());
    }
}

void save_patterns(const std::string& path, const PatternSet& patterns,
                   const std::string& model_hash) {
    json j;
    j["format_version"] = kFormatVersion;
    j["model_hash"] = model_hash;
    j["sample_count"] = patterns.sample_count;
    auto layer = [](const Matrix& a, const std::vector<std::size_t>& dead) {
        json l;
        l["a"] = tensor_to_json({a.rows(), a.cols()}, a.data(), a.size());
        l["dead_neurons"] = dead;
        return l;
    };
    j["layers"] = {{"conv", layer(patterns.conv_a, patterns.conv_dead)},
                   {"dense1", layer(patterns.dense1_a, patterns.dense1_dead)},
                   {"dense2", layer(patterns.dense2_a, patterns.dense2_dead)}};
    write_file(path, j.dump());
}

PatternSet load_patterns(const std::string& path, const std::string& expected_model_hash) {
    const json j = parse_json(read_file(path), path);
    check_version(j, path);
    try {
        const std::string stored_hash = j.at("model_hash").get<std::string>();
        if (!expected_model_hash.empty() && stored_hash != expected_model_hash) {
            throw HashMismatch("pattern file " + path + " was estimated from a different model");
        }
        PatternSet ps;
        ps.sample_count = j.at("sample_count").get<std::size_t>();
        auto load_layer = [&](const char* name, Matrix& a, std::vector<std::size_t>& dead) {
            const json& l = j.at("layers").at(name);
            const json& t = l.at("a");
            const auto shape = t.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 2) {
                throw CorruptFile("pattern tensor '" + std::string(name) + "' is not 2-d");
            }
            a = Matrix(shape[0], shape[1]);
            a.values() = tensor_from_json(t, shape, name);
            dead = l.at("dead_neurons").get<std::vector<std::size_t>>();
            for (std::size_t idx : dead) {
                if (idx >= shape[0]) {
                    throw CorruptFile("dead neuron index out of range in " + path);
                }
            }
        };
        load_layer("conv", ps.conv_a, ps.conv_dead);
        load_layer("dense1", ps.dense1_a, ps.dense1_dead);
        load_layer("dense2", ps.dense2_a, ps.dense2_dead);
        return ps;
    } catch (const json::exception& e) {
        throw CorruptFile("pattern file " + path + ": " + e.what());
    }
}

void save_attribution_json(const std::string& path, const AttributionResult& result) {
    json j;
    j["tokens"] = result.tokens;
    j["scores"] = result.word_scores;
    j["target_class"] = result.target_class;
    j["logit"] = result.logit;
    j["mode"] = mode_name(result.mode);
    write_file(path, j.dump());
}

AttributionResult load_attribution_json(const std::string& path) {
    const json j = parse_json(read_file(path), path);
    try {
        AttributionResult result;
        result.tokens = j.at("tokens").get<std::vector<std::string>>();
        result.word_scores = j.at("scores").get<Vector>();
        result.target_class = j.at("target_class").get<int>();
        result.logit = j.at("logit").get<double>();
        result.mode = mode_from_name(j.at("mode").get<std::string>());
        if (result.tokens.size() != result.word_scores.size()) {
            throw CorruptFile("attribution file " + path + ": token/score counts differ");
        }
        return result;
    } catch (const json::exception& e) {
        throw CorruptFile("attribution file " + path + ": " + e.what());
    }
}

}  // namespace patternattr
