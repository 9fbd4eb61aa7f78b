#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "patternattr/attribution.hpp"
#include "patternattr/dataset.hpp"
#include "patternattr/errors.hpp"
#include "patternattr/network.hpp"
#include "patternattr/patterns.hpp"
#include "patternattr/quality.hpp"
#include "patternattr/serialize.hpp"

namespace pa = patternattr;
using nlohmann::json;

namespace {

struct TrainArgs {
    std::string data, model_out;
    std::size_t epochs = 5;
    double lr = 1e-3;
    std::size_t batch = 32;
    std::size_t embed_dim = 64;
    std::uint64_t seed = 42;
};

struct PatternsArgs {
    std::string model, data, patterns_out;
};

struct AttributeArgs {
    std::string model, patterns, text, input;
    std::string mode = "patternattribution";
    std::string target = "predicted";
    std::string format = "json";
    std::string out;
};

struct RenderArgs {
    std::string attribution, out;
    double gamma = 1.0;
};

struct BenchArgs {
    std::size_t d = 10;
    std::size_t n = 50000;
    double noise = 1.0;
    std::uint64_t seed = 0;
    std::string out;
};

struct EvalArgs {
    std::string model, data;
};

int run_train(const TrainArgs& args) {
    pa::LabeledDataset data = pa::load_dataset(args.data);
    pa::NetworkConfig cfg;
    cfg.vocab_size = static_cast<std::size_t>(data.vocab.size());
    cfg.embed_dim = args.embed_dim;
    pa::Network net = pa::Network::init(cfg, args.seed);

    pa::TrainConfig train_cfg{args.epochs, args.lr, args.batch, args.seed};
    const auto history = pa::train(net, data, train_cfg);
    for (std::size_t e = 0; e < history.size(); ++e) {
        std::printf("epoch %zu/%zu loss=%.6f accuracy=%.4f\n", e + 1, history.size(),
                    history[e].loss, history[e].accuracy);
    }

    pa::TrainingMeta meta;
    meta.seed = args.seed;
    meta.epochs = args.epochs;
    if (!history.empty()) {
        meta.final_loss = history.back().loss;
        meta.final_accuracy = history.back().accuracy;
    }
    pa::save_model(args.model_out, net, data.vocab, meta);
    std::printf("saved model to %s\n", args.model_out.c_str());
    return 0;
}

int run_patterns(const PatternsArgs& args) {
    const pa::LoadedModel model = pa::load_model(args.model);
    const pa::LabeledDataset data = pa::load_dataset(args.data, model.vocab);
    const pa::PatternSet patterns = pa::estimate_patterns(model.net, data);
    pa::save_patterns(args.patterns_out, patterns, model.file_hash);
    std::printf("estimated patterns from %zu documents, saved to %s\n", patterns.sample_count,
                args.patterns_out.c_str());
    return 0;
}

int run_attribute(const AttributeArgs& args) {
    const pa::LoadedModel model = pa::load_model(args.model);
    const pa::AttributionMode mode = pa::mode_from_name(args.mode);

    pa::PatternSet patterns;
    const pa::PatternSet* patterns_ptr = nullptr;
    if (mode != pa::AttributionMode::gradient) {
        patterns = pa::load_patterns(args.patterns, model.file_hash);
        patterns_ptr = &patterns;
    }

    std::string text = args.text;
    if (!args.input.empty()) {
        std::ifstream file(args.input, std::ios::binary);
        if (!file) {
            throw pa::FileNotFound("cannot open input file: " + args.input);
        }
        std::ostringstream buffer;
        buffer << file.rdbuf();
        text = buffer.str();
    }

    pa::AttributionTarget target = pa::AttributionTarget::use_predicted();
    if (args.target != "predicted") {
        target = pa::AttributionTarget::use_class(std::stoi(args.target));
    }

    const pa::AttributionResult result =
        pa::attribute(model.net, model.vocab, patterns_ptr, text, mode, target);
    if (args.format == "json") {
        pa::save_attribution_json(args.out, result);
    } else {
        std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
        file << pa::render_html(result.tokens, result.word_scores);
    }
    std::printf("target_class=%d logit=%.6f written to %s\n", result.target_class, result.logit,
                args.out.c_str());
    return 0;
}

int run_render(const RenderArgs& args) {
    const pa::AttributionResult result = pa::load_attribution_json(args.attribution);
    std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw pa::Error("cannot write file: " + args.out);
    }
    file << pa::render_html(result.tokens, result.word_scores, {args.gamma});
    return 0;
}

int run_bench(const BenchArgs& args) {
    const pa::SyntheticProblem problem =
        pa::generate_synthetic({args.d, args.n, args.noise, args.seed});
    const auto rows = pa::criteria_report(problem, pa::default_estimators(problem));

    json out = json::array();
    for (const auto& row : rows) {
        out.push_back({{"estimator", row.estimator},
                       {"params", row.params},
                       {"rho", row.rho},
                       {"rho_prime", row.rho_prime},
                       {"n", args.n},
                       {"d", args.d},
                       {"seed", args.seed}});
    }
    std::ofstream file(args.out, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw pa::Error("cannot write file: " + args.out);
    }
    file << out.dump(2) << "\n";
    for (const auto& row : rows) {
        std::printf("%-10s %-10s rho=%.4f rho_prime=%.4f\n", row.estimator.c_str(),
                    row.params.c_str(), row.rho, row.rho_prime);
    }
    return 0;
}

int run_eval(const EvalArgs& args) {
    const pa::LoadedModel model = pa::load_model(args.model);
    const pa::LabeledDataset data = pa::load_dataset(args.data, model.vocab);
    const pa::BinaryMetrics m = pa::evaluate(model.net, data);
    json out = {{"accuracy", m.accuracy},
                {"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1}};
    std::cout << out.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pattern-based attribution toolkit for a bigram CNN sentiment classifier"};
    app.require_subcommand(1);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a classifier on a CSV corpus");
    train_cmd->add_option("--data", train_args.data, "training CSV (polarity,title,body)")
        ->required();
    train_cmd->add_option("--model-out", train_args.model_out, "output model path")->required();
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs");
    train_cmd->add_option("--lr", train_args.lr, "Adam learning rate");
    train_cmd->add_option("--batch", train_args.batch, "mini-batch size");
    train_cmd->add_option("--embed-dim", train_args.embed_dim, "embedding dimension");
    train_cmd->add_option("--seed", train_args.seed, "run seed");

    PatternsArgs patterns_args;
    auto* patterns_cmd = app.add_subcommand("patterns", "estimate signal patterns from data");
    patterns_cmd->add_option("--model", patterns_args.model, "model path")->required();
    patterns_cmd->add_option("--data", patterns_args.data, "estimation CSV (the training split)")
        ->required();
    patterns_cmd->add_option("--patterns-out", patterns_args.patterns_out, "output pattern path")
        ->required();

    AttributeArgs attribute_args;
    auto* attribute_cmd = app.add_subcommand("attribute", "explain one document");
    attribute_cmd->add_option("--model", attribute_args.model, "model path")->required();
    attribute_cmd->add_option("--patterns", attribute_args.patterns,
                              "pattern path (required for pattern modes)");
    auto* text_opt = attribute_cmd->add_option("--text", attribute_args.text, "document text");
    attribute_cmd->add_option("--input", attribute_args.input, "read document text from a file")
        ->excludes(text_opt);
    attribute_cmd
        ->add_option("--mode", attribute_args.mode, "gradient|patternnet|patternattribution")
        ->check(CLI::IsMember({"gradient", "patternnet", "patternattribution"}));
    attribute_cmd->add_option("--target", attribute_args.target, "predicted|0|1")
        ->check(CLI::IsMember({"predicted", "0", "1"}));
    attribute_cmd->add_option("--format", attribute_args.format, "json|html")
        ->check(CLI::IsMember({"json", "html"}));
    attribute_cmd->add_option("--out", attribute_args.out, "output path")->required();

    RenderArgs render_args;
    auto* render_cmd = app.add_subcommand("render", "render an attribution JSON as HTML");
    render_cmd->add_option("--attribution", render_args.attribution, "attribution JSON path")
        ->required();
    render_cmd->add_option("--out", render_args.out, "output HTML path")->required();
    render_cmd->add_option("--gamma", render_args.gamma, "highlight intensity in (0,1]");

    BenchArgs bench_args;
    auto* bench_cmd =
        app.add_subcommand("bench", "score the estimator suite on a synthetic problem");
    bench_cmd->add_option("--d", bench_args.d, "input dimension")->required();
    bench_cmd->add_option("--n", bench_args.n, "sample count")->required();
    bench_cmd->add_option("--noise", bench_args.noise, "noise scale");
    bench_cmd->add_option("--seed", bench_args.seed, "generator seed")->required();
    bench_cmd->add_option("--out", bench_args.out, "output JSON path")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "print classification metrics as JSON");
    eval_cmd->add_option("--model", eval_args.model, "model path")->required();
    eval_cmd->add_option("--data", eval_args.data, "evaluation CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (app.got_subcommand(train_cmd)) {
            return run_train(train_args);
        }
        if (app.got_subcommand(patterns_cmd)) {
            return run_patterns(patterns_args);
        }
        if (app.got_subcommand(attribute_cmd)) {
            if (attribute_args.text.empty() && attribute_args.input.empty()) {
                std::cerr << "attribute: one of --text or --input is required\n\n" << app.help();
                return 2;
            }
            if (attribute_args.mode != "gradient" && attribute_args.patterns.empty()) {
                std::cerr << "attribute: --patterns is required for mode " << attribute_args.mode
                          << "\n\n"
                          << app.help();
                return 2;
            }
            return run_attribute(attribute_args);
        }
        if (app.got_subcommand(render_cmd)) {
            return run_render(render_args);
        }
        if (app.got_subcommand(bench_cmd)) {
            return run_bench(bench_args);
        }
        if (app.got_subcommand(eval_cmd)) {
            return run_eval(eval_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
