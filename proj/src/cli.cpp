#include "svmif/cli.hpp"

#include "svmif/benchmark.hpp"
#include "svmif/error.hpp"
#include "svmif/io.hpp"
#include "svmif/similarity.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

namespace svmif {

namespace {

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string data;
    bool series = false;
    std::string model;
    std::string output;
    std::string trace;
    std::string rules;
    std::string report;
    std::string test;
    std::string names;
};

std::string fmt(double v, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

RunConfig load_config(const Options& o) {
    std::vector<std::string> overrides = o.overrides;
    if (o.seed) {
        overrides.push_back("seed=" + std::to_string(*o.seed));
    }
    if (o.config.empty()) {
        return parse_run_config("{}", overrides);
    }
    return load_run_config(o.config, overrides);
}

struct TrainingData {
    Dataset train;
    std::optional<Dataset> test;
    std::vector<std::string> names;
};

// A series file turns into lag pairs split 500/500; otherwise the file is a dataset.
TrainingData load_data(const Options& o) {
    if (o.data.empty()) {
        throw InputError("--data is required");
    }
    if (o.series) {
        const SupervisedSeries pairs = make_supervised(read_series_file(o.data));
        return {pairs.train(), pairs.test(), {"x(t-2)", "x(t-1)"}};
    }
    TrainingData d{read_dataset_file(o.data), std::nullopt, {}};
    if (!o.test.empty()) {
        d.test = read_dataset_file(o.test);
    }
    return d;
}

std::vector<std::string> split_names(const std::string& names) {
    std::vector<std::string> out;
    if (names.empty()) {
        return out;
    }
    std::stringstream ss(names);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(item);
    }
    return out;
}

double model_rmse(const ModelFile& m, const Dataset& data, std::vector<double>* predictions = nullptr) {
    std::vector<double> pred;
    for (const Sample& s : data) {
        pred.push_back(predict(m, s.x));
    }
    const double r = rmse(pred, data.targets());
    if (predictions) {
        *predictions = std::move(pred);
    }
    return r;
}

std::string with_suffix(const std::string& path, const std::string& chosen, const char* suffix) {
    if (!chosen.empty()) {
        return chosen;
    }
    const std::filesystem::path p(path);
    return (p.parent_path() / p.stem()).string() + suffix;
}

template <typename Fn>
std::string render(Fn fn) {
    std::ostringstream s;
    fn(s);
    return s.str();
}

int cmd_gen_data(const Options& o, std::ostream& out) {
    if (o.config.empty()) {
        throw InputError("--config is required");
    }
    const RunConfig cfg = load_config(o);
    const std::vector<double> series = generate_mackey_glass(cfg.mackey_glass, cfg.seed);
    write_text_file(o.output, render([&](std::ostream& s) { write_series(s, series, cfg.mackey_glass.sample_every); }));
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    out << "wrote " << series.size() << " values to " << o.output << ", range [" << fmt(*lo) << ", "
        << fmt(*hi) << "]\n";
    return exit_ok;
}

int cmd_train(const Options& o, std::ostream& out) {
    const RunConfig cfg = load_config(o);
    const TrainingData data = load_data(o);
    const SvrTrainResult r = train_svr(data.train, cfg.svr);
    write_text_file(o.output, serialize(r.model));
    const ModelFile m{r.model, std::nullopt};
    out << "support vectors: " << r.model.support_vectors.size() << "\n";
    out << "train rmse: " << fmt(model_rmse(m, data.train)) << "\n";
    if (data.test) {
        out << "test rmse: " << fmt(model_rmse(m, *data.test)) << "\n";
    }
    if (!r.converged) {
        out << "solver stopped before reaching the KKT tolerance (max violation " << fmt(r.max_violation) << ")\n";
        return exit_not_converged;
    }
    return exit_ok;
}

int cmd_extract(const Options& o, std::ostream& out) {
    const RunConfig cfg = load_config(o);
    const TrainingData data = load_data(o);
    const InterpretableModel model = model_extraction(data.train, cfg.extraction);
    const double similarity = max_pairwise_similarity(model.rulebase);
    if (similarity > cfg.extraction.k + 1e-12) {
        throw std::logic_error("extracted rule base violates the similarity bound: " + fmt(similarity, 17));
    }
    write_text_file(o.output, serialize(model));
    write_text_file(with_suffix(o.output, o.rules, ".rules.txt"), format_rules(model.rulebase, data.names));
    write_text_file(with_suffix(o.output, o.trace, ".trace.csv"),
                    render([&](std::ostream& s) { write_extraction_trace(s, model.report); }));
    write_text_file(with_suffix(o.output, o.report, ".report.json"), serialize(model.report));

    const ModelFile m{model.rulebase, model.report};
    out << "rules: " << model.rulebase.size() << "\n";
    out << "train rmse: " << fmt(model_rmse(m, data.train)) << "\n";
    if (data.test) {
        out << "test rmse: " << fmt(model_rmse(m, *data.test)) << "\n";
    }
    out << "max pairwise similarity: " << fmt(similarity) << "\n";
    if (!model.report.converged) {
        out << "training error tolerance not met; the first iterate was kept\n";
        return exit_not_converged;
    }
    return exit_ok;
}

int cmd_refine(const Options& o, std::ostream& out) {
    const RunConfig cfg = load_config(o);
    const ModelFile file = load_model(o.model);
    const auto* rb = std::get_if<FuzzyRuleBase>(&file.model);
    if (!rb) {
        throw InputError("refine needs a fuzzy rule base model");
    }
    const TrainingData data = load_data(o);
    const RefineResult r = refine(*rb, data.train, cfg.refine);
    write_text_file(o.output, serialize(r.rules));
    if (!o.trace.empty()) {
        write_text_file(o.trace, render([&](std::ostream& s) { write_loss_trace(s, r.loss_trace); }));
    }
    out << "train mse: " << fmt(mean_squared_error(*rb, data.train)) << " -> "
        << fmt(mean_squared_error(r.rules, data.train)) << "\n";
    if (r.rejected_steps > 0) {
        out << "steps skipped by the similarity bound: " << r.rejected_steps << "\n";
    }
    if (r.diverged) {
        out << "refinement diverged\n";
        return exit_not_converged;
    }
    return exit_ok;
}

int cmd_eval(const Options& o, std::ostream& out) {
    const ModelFile m = load_model(o.model);
    const TrainingData data = load_data(o);
    std::vector<double> predictions;
    const Dataset& traced = data.test ? *data.test : data.train;
    if (data.test) {
        out << "train rmse: " << fmt(model_rmse(m, data.train), 17) << "\n";
        out << "test rmse: " << fmt(model_rmse(m, *data.test, &predictions), 17) << "\n";
    } else {
        out << "rmse: " << fmt(model_rmse(m, data.train, &predictions), 17) << "\n";
    }
    if (!o.trace.empty()) {
        write_text_file(o.trace, render([&](std::ostream& s) {
                            write_prediction_trace(s, traced.targets(), predictions);
                        }));
    }
    return exit_ok;
}

int cmd_rules(const Options& o, std::ostream& out) {
    const ModelFile m = load_model(o.model);
    const std::vector<std::string> names = split_names(o.names);
    if (const auto* rb = std::get_if<FuzzyRuleBase>(&m.model)) {
        out << format_rules(*rb, names);
    } else {
        out << format_rules(from_svr(std::get<SvrModel>(m.model)), names);
    }
    return exit_ok;
}

int cmd_experiment(const Options& o, std::ostream& out) {
    const RunConfig cfg = load_config(o);
    const std::filesystem::path dir(o.output);
    std::filesystem::create_directories(dir);
    const ExperimentReport r = run_experiment(cfg.mackey_glass, cfg.extraction);
    write_text_file((dir / "model.json").string(), serialize(r.model));
    write_text_file((dir / "report.json").string(), serialize(r));
    write_text_file((dir / "rules.txt").string(), r.rules_text);
    write_text_file((dir / "trace.csv").string(),
                    render([&](std::ostream& s) { write_extraction_trace(s, r.model.report); }));
    write_text_file((dir / "predictions.csv").string(), render([&](std::ostream& s) {
                        write_prediction_trace(s, r.test_targets, r.test_predictions);
                    }));
    out << r.rules_text;
    out << "rules: " << r.rule_count << "\n";
    out << "train rmse: " << fmt(r.train_rmse) << "\n";
    out << "test rmse: " << fmt(r.test_rmse) << "\n";
    out << "raw svr test rmse (epsilon " << fmt(r.raw_svr_epsilon) << ", " << r.raw_svr_support_vectors
        << " support vectors): " << fmt(r.raw_svr_test_rmse) << "\n";
    return r.model.report.converged ? exit_ok : exit_not_converged;
}

} // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fuzzy rule extraction from support vector regression"};
    app.footer("Exit status: 0 success, 2 input error, 3 tolerance or convergence not met\n"
               "(artifacts are still written), 4 internal error.");
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
        if (needs_config) {
            c->required();
        }
        sub->add_option("--set", o.overrides, "override a config value, e.g. extraction.k=0.8");
        sub->add_option("--seed", o.seed, "seed for every random choice (overrides the config)");
    };
    auto data_options = [&](CLI::App* sub) {
        sub->add_option("--data", o.data, "dataset file (features then target per line)")->required();
        sub->add_flag("--series", o.series, "treat --data as a series: lag pairs, 500 train / 500 test");
    };

    auto* gen = app.add_subcommand("gen-data", "generate a Mackey-Glass series");
    common(gen, true);
    gen->add_option("--output", o.output, "series file to write")->required();

    auto* train = app.add_subcommand("train", "train a plain Gaussian SVR");
    common(train, false);
    data_options(train);
    train->add_option("--output", o.output, "model file to write")->required();

    auto* extract = app.add_subcommand("extract", "extract an interpretable fuzzy model");
    common(extract, false);
    data_options(extract);
    extract->add_option("--test", o.test, "held-out dataset to score");
    extract->add_option("--output", o.output, "model file to write")->required();
    extract->add_option("--rules", o.rules, "rule listing (default <output>.rules.txt)");
    extract->add_option("--trace", o.trace, "iteration trace (default <output>.trace.csv)");
    extract->add_option("--report", o.report, "extraction report (default <output>.report.json)");

    auto* ref = app.add_subcommand("refine", "tune membership functions by gradient descent");
    common(ref, false);
    data_options(ref);
    ref->add_option("--model", o.model, "fuzzy model file")->required();
    ref->add_option("--output", o.output, "refined rule base to write")->required();
    ref->add_option("--trace", o.trace, "per-epoch loss trace");

    auto* eval = app.add_subcommand("eval", "score a model on a dataset");
    data_options(eval);
    eval->add_option("--model", o.model, "model file")->required();
    eval->add_option("--trace", o.trace, "write t,target,prediction rows");

    auto* rules = app.add_subcommand("rules", "print the rule listing of a model");
    rules->add_option("--model", o.model, "model file")->required();
    rules->add_option("--names", o.names, "comma-separated input names");

    auto* exp = app.add_subcommand("experiment", "full Mackey-Glass experiment");
    common(exp, false);
    exp->add_option("--output", o.output, "directory for the artifacts")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) {
            reversed.pop_back();
        }
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (*gen) return cmd_gen_data(o, out);
        if (*train) return cmd_train(o, out);
        if (*extract) return cmd_extract(o, out);
        if (*ref) return cmd_refine(o, out);
        if (*eval) return cmd_eval(o, out);
        if (*rules) return cmd_rules(o, out);
        if (*exp) return cmd_experiment(o, out);
        return exit_input_error;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const CoverageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const DegenerateModelError& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return exit_internal_error;
    }
}

} // namespace svmif
