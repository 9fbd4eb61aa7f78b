#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "patternattr/errors.hpp"
#include "patternattr/serialize.hpp"
#include "support/corpus.hpp"

using namespace patternattr;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("patternattr_serialize_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

Vocab small_vocab() {
    Vocab vocab;
    vocab.token_to_id = {{"alpha", 1}, {"beta", 2}, {"<odd token>", 3}};
    return vocab;
}

}  // namespace

TEST_CASE("model save/load roundtrip is bit-exact") {
    TempDir dir;
    NetworkConfig cfg;
    cfg.vocab_size = 4;
    cfg.embed_dim = 5;
    cfg.num_filters = 3;
    cfg.hidden_dim = 2;
    const Network net = Network::init(cfg, 1234);
    const Vocab vocab = small_vocab();
    TrainingMeta meta;
    meta.seed = 1234;
    meta.epochs = 7;
    meta.final_loss = 0.12345678901234567;
    meta.final_accuracy = 0.875;

    const std::string path = dir.file("model.json");
    save_model(path, net, vocab, meta);
    const LoadedModel loaded = load_model(path);

    CHECK(loaded.net.vocab_size == net.vocab_size);
    CHECK(loaded.net.embed_dim == net.embed_dim);
    CHECK(loaded.net.num_filters == net.num_filters);
    CHECK(loaded.net.hidden_dim == net.hidden_dim);
    CHECK(loaded.net.dropout_rate == net.dropout_rate);
    CHECK(bitwise_equal(loaded.net.embedding.values(), net.embedding.values()));
    CHECK(bitwise_equal(loaded.net.conv_w.values(), net.conv_w.values()));
    CHECK(bitwise_equal(loaded.net.conv_b, net.conv_b));
    CHECK(bitwise_equal(loaded.net.dense1_w.values(), net.dense1_w.values()));
    CHECK(bitwise_equal(loaded.net.dense1_b, net.dense1_b));
    CHECK(bitwise_equal(loaded.net.dense2_w.values(), net.dense2_w.values()));
    CHECK(bitwise_equal(loaded.net.dense2_b, net.dense2_b));
    CHECK(loaded.vocab.token_to_id == vocab.token_to_id);
    CHECK(loaded.meta.seed == meta.seed);
    CHECK(loaded.meta.epochs == meta.epochs);
    CHECK(loaded.meta.final_loss == meta.final_loss);
    CHECK(loaded.meta.final_accuracy == meta.final_accuracy);
    CHECK(loaded.file_hash == sha256_file(path));

    // a second save of the loaded model reproduces the bytes
    const std::string path2 = dir.file("model2.json");
    save_model(path2, loaded.net, loaded.vocab, loaded.meta);
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("pattern save/load roundtrip and hash binding") {
    TempDir dir;
    NetworkConfig cfg;
    cfg.vocab_size = 4;
    cfg.embed_dim = 3;
    cfg.num_filters = 2;
    cfg.hidden_dim = 2;
    const Network net = Network::init(cfg, 7);
    const std::string model_path = dir.file("model.json");
    save_model(model_path, net, small_vocab(), {});
    const std::string model_hash = sha256_file(model_path);

    PatternSet ps;
    ps.conv_a = Matrix(2, 6, 0.25);
    ps.dense1_a = Matrix(2, 2, -0.5);
    ps.dense2_a = Matrix(2, 2, 1.0 / 3.0);
    ps.conv_dead = {1};
    ps.dense1_dead = {};
    ps.dense2_dead = {0, 1};
    ps.sample_count = 99;

    const std::string path = dir.file("patterns.json");
    save_patterns(path, ps, model_hash);
    const PatternSet loaded = load_patterns(path, model_hash);
    CHECK(bitwise_equal(loaded.conv_a.values(), ps.conv_a.values()));
    CHECK(bitwise_equal(loaded.dense1_a.values(), ps.dense1_a.values()));
    CHECK(bitwise_equal(loaded.dense2_a.values(), ps.dense2_a.values()));
    CHECK(loaded.conv_dead == ps.conv_dead);
    CHECK(loaded.dense2_dead == ps.dense2_dead);
    CHECK(loaded.sample_count == 99);

    // retraining produces a different model file, so the stored hash no
    // longer matches
    const Network retrained = Network::init(cfg, 8);
    const std::string other_model = dir.file("model_b.json");
    save_model(other_model, retrained, small_vocab(), {});
    CHECK_THROWS_AS(load_patterns(path, sha256_file(other_model)), HashMismatch);

    // empty expected hash skips the check
    CHECK_NOTHROW(load_patterns(path, ""));
}

TEST_CASE("corrupt and unsupported files are rejected") {
    TempDir dir;
    NetworkConfig cfg;
    cfg.vocab_size = 3;
    cfg.embed_dim = 2;
    cfg.num_filters = 2;
    cfg.hidden_dim = 2;
    const Network net = Network::init(cfg, 21);
    const std::string path = dir.file("model.json");
    save_model(path, net, small_vocab(), {});

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_model(dir.file("nope.json")), FileNotFound);
    }
    SUBCASE("not JSON") {
        const std::string bad = dir.file("bad.json");
        std::ofstream(bad) << "definitely { not json";
        CHECK_THROWS_AS(load_model(bad), CorruptFile);
    }
    SUBCASE("future format version") {
        std::string text = slurp(path);
        const auto at = text.find("\"format_version\":1");
        REQUIRE(at != std::string::npos);
        text.replace(at, std::strlen("\"format_version\":1"), "\"format_version\":9");
        const std::string versioned = dir.file("versioned.json");
        std::ofstream(versioned, std::ios::binary) << text;
        CHECK_THROWS_AS(load_model(versioned), UnsupportedVersion);
    }
    SUBCASE("shape inconsistent with data length") {
        std::string text = slurp(path);
        // dense2_b has shape [2]; claim [3] without touching the data
        const auto at = text.find("\"dense2_b\":{\"data\":[");
        REQUIRE(at != std::string::npos);
        const auto shape_at = text.find("\"shape\":[2]", at);
        REQUIRE(shape_at != std::string::npos);
        text.replace(shape_at, std::strlen("\"shape\":[2]"), "\"shape\":[3]");
        const std::string corrupted = dir.file("corrupted.json");
        std::ofstream(corrupted, std::ios::binary) << text;
        CHECK_THROWS_AS(load_model(corrupted), CorruptFile);
    }
    SUBCASE("missing tensor") {
        std::string text = slurp(path);
        const auto at = text.find("\"conv_b\"");
        REQUIRE(at != std::string::npos);
        // rename the key so the loader cannot find it
        text.replace(at, std::strlen("\"conv_b\""), "\"conv_x\"");
        const std::string renamed = dir.file("renamed.json");
        std::ofstream(renamed, std::ios::binary) << text;
        CHECK_THROWS_AS(load_model(renamed), CorruptFile);
    }
}

TEST_CASE("attribution json roundtrip") {
    TempDir dir;
    AttributionResult result;
    result.tokens = {"Great", "book", "<tag>"};
    result.word_scores = {0.5, -0.125, 0.0};
    result.target_class = 1;
    result.logit = 1.75;
    result.mode = AttributionMode::pattern_attribution;

    const std::string path = dir.file("attr.json");
    save_attribution_json(path, result);
    const AttributionResult loaded = load_attribution_json(path);
    CHECK(loaded.tokens == result.tokens);
    CHECK(bitwise_equal(loaded.word_scores, result.word_scores));
    CHECK(loaded.target_class == 1);
    CHECK(loaded.logit == 1.75);
    CHECK(loaded.mode == AttributionMode::pattern_attribution);
}

TEST_CASE("sha256 digest matches the reference vector") {
    // FIPS 180-2 test vector for "abc"
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
