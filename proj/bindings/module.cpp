#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "patternattr/attribution.hpp"
#include "patternattr/dataset.hpp"
#include "patternattr/errors.hpp"
#include "patternattr/network.hpp"
#include "patternattr/patterns.hpp"
#include "patternattr/quality.hpp"
#include "patternattr/serialize.hpp"

namespace py = pybind11;
using namespace patternattr;

namespace {

Matrix matrix_from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) {
        throw DimensionMismatch("expected a 2-d array");
    }
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.data());
    return m;
}

py::array_t<double> numpy_from_matrix(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::copy(m.data(), m.data() + m.size(), arr.mutable_data());
    return arr;
}

py::array_t<double> numpy_from_vector(const Vector& v) {
    py::array_t<double> arr(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), arr.mutable_data());
    return arr;
}

Vocab vocab_from_dict(const std::unordered_map<std::string, int>& mapping) {
    Vocab vocab;
    vocab.token_to_id = mapping;
    return vocab;
}

AttributionTarget target_from_object(const py::object& target) {
    if (py::isinstance<py::str>(target)) {
        const auto text = target.cast<std::string>();
        if (text == "predicted") {
            return AttributionTarget::use_predicted();
        }
        throw BadConfig("target must be 'predicted' or a class index");
    }
    return AttributionTarget::use_class(target.cast<int>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "pattern-based attribution for a bigram CNN sentiment classifier";

    py::register_exception<Error>(m, "PatternAttrError", PyExc_RuntimeError);

    // ---- text -------------------------------------------------------------
    m.def("tokenize", &tokenize, py::arg("text"),
          "Whitespace tokenization with punctuation and clitic detachment.");

    py::class_<LabeledDataset>(m, "LabeledDataset")
        .def_property_readonly("size",
                               [](const LabeledDataset& d) { return d.records.size(); })
        .def_property_readonly("vocab",
                               [](const LabeledDataset& d) { return d.vocab.token_to_id; })
        .def_property_readonly("labels", [](const LabeledDataset& d) {
            std::vector<int> labels;
            labels.reserve(d.records.size());
            for (const auto& rec : d.records) {
                labels.push_back(rec.label);
            }
            return labels;
        });

    m.def(
        "load_dataset",
        [](const std::string& path, const py::object& vocab) {
            if (vocab.is_none()) {
                return load_dataset(path);
            }
            return load_dataset(path,
                                vocab_from_dict(vocab.cast<std::unordered_map<std::string, int>>()));
        },
        py::arg("path"), py::arg("vocab") = py::none(),
        "Load a (polarity, title, body) CSV; builds the vocabulary unless one is given.");

    // ---- core math ----------------------------------------------------------
    m.def("pearson",
          [](const Vector& u, const Vector& v) { return pearson(u, v); },
          py::arg("u"), py::arg("v"));
    m.def(
        "covariance_vector",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const Vector& y) { return numpy_from_vector(covariance_vector(matrix_from_numpy(x), y)); },
        py::arg("x"), py::arg("y"));
    m.def(
        "max_projection_correlation",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& d,
           const Vector& y) {
            const auto result = max_projection_correlation(matrix_from_numpy(d), y);
            return py::make_tuple(result.rho_max, numpy_from_vector(result.v_star));
        },
        py::arg("d"), py::arg("y"));

    // ---- quality ------------------------------------------------------------
    py::class_<SyntheticProblem>(m, "SyntheticProblem")
        .def_property_readonly("w", [](const SyntheticProblem& p) { return numpy_from_vector(p.w); })
        .def_property_readonly("a_star",
                               [](const SyntheticProblem& p) { return numpy_from_vector(p.a_star); })
        .def_property_readonly("x", [](const SyntheticProblem& p) { return numpy_from_matrix(p.x); })
        .def_property_readonly("s_true",
                               [](const SyntheticProblem& p) { return numpy_from_matrix(p.s_true); })
        .def_property_readonly("d_noise",
                               [](const SyntheticProblem& p) { return numpy_from_matrix(p.d_noise); })
        .def_property_readonly("y", [](const SyntheticProblem& p) { return numpy_from_vector(p.y); })
        .def_readonly("noise_scale", &SyntheticProblem::noise_scale);

    m.def(
        "generate_synthetic",
        [](std::size_t d, std::size_t n, double noise_scale, std::uint64_t seed) {
            return generate_synthetic({d, n, noise_scale, seed});
        },
        py::arg("d"), py::arg("n"), py::arg("noise_scale") = 1.0, py::arg("seed") = 0);

    py::class_<EstimatorSpec>(m, "EstimatorSpec")
        .def_static("pattern", &EstimatorSpec::pattern, py::arg("a"), py::arg("label") = "")
        .def_static("direction", &EstimatorSpec::direction, py::arg("u"), py::arg("label") = "")
        .def_static("identity", &EstimatorSpec::identity)
        .def_static("zero", &EstimatorSpec::zero)
        .def_static("artificial", &EstimatorSpec::artificial, py::arg("m"))
        .def_property_readonly("name", &EstimatorSpec::name)
        .def_property_readonly("params", &EstimatorSpec::params);

    m.def(
        "estimate_signal",
        [](const EstimatorSpec& spec,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const Vector& w, const py::object& s_true) {
            if (s_true.is_none()) {
                return numpy_from_matrix(estimate_signal(spec, matrix_from_numpy(x), w));
            }
            const Matrix st = matrix_from_numpy(
                s_true.cast<py::array_t<double, py::array::c_style | py::array::forcecast>>());
            return numpy_from_matrix(estimate_signal(spec, matrix_from_numpy(x), w, &st));
        },
        py::arg("spec"), py::arg("x"), py::arg("w"), py::arg("s_true") = py::none());

    m.def(
        "rho",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const Vector& w,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& s) {
            return rho(matrix_from_numpy(x), w, matrix_from_numpy(s));
        },
        py::arg("x"), py::arg("w"), py::arg("s"));
    m.def(
        "rho_prime",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, const Vector& w,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& s) {
            return rho_prime(matrix_from_numpy(x), w, matrix_from_numpy(s));
        },
        py::arg("x"), py::arg("w"), py::arg("s"));

    m.def(
        "criteria_report",
        [](const SyntheticProblem& problem, const py::object& specs) {
            std::vector<EstimatorSpec> spec_list;
            if (specs.is_none()) {
                spec_list = default_estimators(problem);
            } else {
                spec_list = specs.cast<std::vector<EstimatorSpec>>();
            }
            py::list rows;
            for (const auto& row : criteria_report(problem, spec_list)) {
                py::dict d;
                d["estimator"] = row.estimator;
                d["params"] = row.params;
                d["rho"] = row.rho;
                d["rho_prime"] = row.rho_prime;
                rows.append(d);
            }
            return rows;
        },
        py::arg("problem"), py::arg("specs") = py::none(),
        "Scores estimators on a synthetic problem; defaults to the benchmark set.");

    // ---- network ------------------------------------------------------------
    py::class_<Network>(m, "Network")
        .def_static(
            "init",
            [](std::size_t vocab_size, std::size_t embed_dim, std::size_t num_filters,
               std::size_t hidden_dim, double dropout_rate, std::uint64_t seed) {
                return Network::init(
                    {vocab_size, embed_dim, num_filters, hidden_dim, dropout_rate}, seed);
            },
            py::arg("vocab_size"), py::arg("embed_dim") = 64, py::arg("num_filters") = 150,
            py::arg("hidden_dim") = 128, py::arg("dropout_rate") = 0.5, py::arg("seed") = 42)
        .def_readonly("vocab_size", &Network::vocab_size)
        .def_readonly("embed_dim", &Network::embed_dim)
        .def_readonly("num_filters", &Network::num_filters)
        .def_readonly("hidden_dim", &Network::hidden_dim)
        .def(
            "train",
            [](Network& net, const LabeledDataset& data, std::size_t epochs, double lr,
               std::size_t batch, std::uint64_t seed) {
                py::list history;
                for (const auto& epoch : train(net, data, {epochs, lr, batch, seed})) {
                    py::dict d;
                    d["loss"] = epoch.loss;
                    d["accuracy"] = epoch.accuracy;
                    history.append(d);
                }
                return history;
            },
            py::arg("data"), py::arg("epochs") = 5, py::arg("lr") = 1e-3, py::arg("batch") = 32,
            py::arg("seed") = 42)
        .def("evaluate",
             [](const Network& net, const LabeledDataset& data) {
                 const BinaryMetrics metrics = evaluate(net, data);
                 py::dict d;
                 d["accuracy"] = metrics.accuracy;
                 d["precision"] = metrics.precision;
                 d["recall"] = metrics.recall;
                 d["f1"] = metrics.f1;
                 return d;
             })
        .def("forward", [](const Network& net, const std::vector<int>& token_ids) {
            return numpy_from_vector(forward(net, token_ids).logits);
        });

    py::class_<PatternSet>(m, "PatternSet")
        .def_readonly("sample_count", &PatternSet::sample_count)
        .def_property_readonly("conv_a",
                               [](const PatternSet& p) { return numpy_from_matrix(p.conv_a); })
        .def_property_readonly("dense1_a",
                               [](const PatternSet& p) { return numpy_from_matrix(p.dense1_a); })
        .def_property_readonly("dense2_a",
                               [](const PatternSet& p) { return numpy_from_matrix(p.dense2_a); })
        .def_readonly("conv_dead", &PatternSet::conv_dead)
        .def_readonly("dense1_dead", &PatternSet::dense1_dead)
        .def_readonly("dense2_dead", &PatternSet::dense2_dead);

    m.def("estimate_patterns", &estimate_patterns, py::arg("net"), py::arg("data"));

    py::class_<AttributionResult>(m, "AttributionResult")
        .def_readonly("tokens", &AttributionResult::tokens)
        .def_property_readonly(
            "relevance", [](const AttributionResult& r) { return numpy_from_matrix(r.relevance); })
        .def_property_readonly(
            "word_scores",
            [](const AttributionResult& r) { return numpy_from_vector(r.word_scores); })
        .def_readonly("target_class", &AttributionResult::target_class)
        .def_readonly("logit", &AttributionResult::logit)
        .def_property_readonly("mode",
                               [](const AttributionResult& r) { return mode_name(r.mode); });

    m.def(
        "attribute",
        [](const Network& net, const std::unordered_map<std::string, int>& vocab,
           const std::string& text, const std::string& mode, const py::object& target,
           const py::object& patterns) {
            const AttributionMode attribution_mode = mode_from_name(mode);
            const PatternSet* ps = nullptr;
            PatternSet held;
            if (!patterns.is_none()) {
                held = patterns.cast<PatternSet>();
                ps = &held;
            }
            return attribute(net, vocab_from_dict(vocab), ps, text, attribution_mode,
                             target_from_object(target));
        },
        py::arg("net"), py::arg("vocab"), py::arg("text"),
        py::arg("mode") = "patternattribution", py::arg("target") = "predicted",
        py::arg("patterns") = py::none());

    m.def(
        "render_html",
        [](const std::vector<std::string>& tokens, const Vector& scores, double gamma) {
            return render_html(tokens, scores, {gamma});
        },
        py::arg("tokens"), py::arg("scores"), py::arg("gamma") = 1.0);

    // ---- persistence ----------------------------------------------------------
    py::class_<LoadedModel>(m, "LoadedModel")
        .def_readonly("net", &LoadedModel::net)
        .def_property_readonly("vocab",
                               [](const LoadedModel& m_) { return m_.vocab.token_to_id; })
        .def_readonly("file_hash", &LoadedModel::file_hash);

    m.def(
        "save_model",
        [](const std::string& path, const Network& net,
           const std::unordered_map<std::string, int>& vocab, std::uint64_t seed,
           std::size_t epochs) {
            TrainingMeta meta;
            meta.seed = seed;
            meta.epochs = epochs;
            save_model(path, net, vocab_from_dict(vocab), meta);
        },
        py::arg("path"), py::arg("net"), py::arg("vocab"), py::arg("seed") = 0,
        py::arg("epochs") = 0);
    m.def("load_model", &load_model, py::arg("path"));
    m.def("save_patterns", &save_patterns, py::arg("path"), py::arg("patterns"),
          py::arg("model_hash"));
    m.def("load_patterns", &load_patterns, py::arg("path"), py::arg("expected_model_hash") = "");
    m.def("sha256_file", &sha256_file, py::arg("path"));
}
