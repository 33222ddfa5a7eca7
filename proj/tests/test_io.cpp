#include "svmif/error.hpp"
#include "svmif/io.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace svmif;

namespace {

SvrModel sample_svr() {
    SvrModel m;
    m.dimension = 2;
    m.bias = 0.125;
    m.kernel.kind = KernelKind::NormalizedGaussian;
    m.support_vectors = {{{0.1, 1.0 / 3.0}, -2.5}, {{1e-17, 4.0}, 0.3}};
    m.kernel.widths = {{0.5, 0.25}, {0.1, 0.7}};
    return m;
}

std::string message_of(auto&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

const char* minimal_config = R"({"mackey_glass": {"tau": 30, "a": 0.2, "b": 10, "c": 0.1}})";

} // namespace

TEST_CASE("SVR models round-trip exactly") {
    const SvrModel m = sample_svr();
    const ModelFile back = parse_model(serialize(m));
    const auto& got = std::get<SvrModel>(back.model);
    CHECK(got.dimension == m.dimension);
    CHECK(got.bias == m.bias);
    CHECK(got.kernel.kind == m.kernel.kind);
    CHECK(got.kernel.widths == m.kernel.widths);
    REQUIRE(got.support_vectors.size() == 2);
    CHECK(got.support_vectors[0].x == m.support_vectors[0].x);
    CHECK(got.support_vectors[1].beta == m.support_vectors[1].beta);
    CHECK_FALSE(back.report.has_value());
    CHECK(serialize(got) == serialize(m));
}

TEST_CASE("rule bases and extracted models round-trip exactly") {
    const FuzzyRuleBase rb({{{{0.48, 0.56}, {0.51, 0.52}}, 1.12}, {{{1.0 / 7.0, 0.3}, {2.0, 1e-3}}, -4.0}},
                           InferenceMode::Normalized);
    const ModelFile plain = parse_model(serialize(rb));
    CHECK(std::get<FuzzyRuleBase>(plain.model) == rb);

    ExtractionReport report;
    report.iterations = {{0.01, 20, 9, 11, 1e-4}, {0.02, 15, 7, 8, 3e-4}};
    report.selected_iteration = 1;
    report.converged = true;
    report.final_rule_count = 2;
    report.final_training_error = 2.5e-4;
    report.merges_performed = 8;
    report.refine_trace = {3e-4, 2.5e-4};
    report.refinement_rejected_steps = 4;
    const InterpretableModel model{rb, report};
    const std::string text = serialize(model);
    const ModelFile back = parse_model(text);
    CHECK(std::get<FuzzyRuleBase>(back.model) == rb);
    REQUIRE(back.report.has_value());
    CHECK(back.report->iterations.size() == 2);
    CHECK(back.report->iterations[1].rules == 7);
    CHECK(back.report->final_training_error == 2.5e-4);
    CHECK(back.report->refine_trace == report.refine_trace);
    CHECK(back.report->refinement_rejected_steps == 4);
    CHECK(serialize(InterpretableModel{std::get<FuzzyRuleBase>(back.model), *back.report}) == text);
}

TEST_CASE("model files carry format and version") {
    const std::string text = serialize(sample_svr());
    CHECK(contains(text, "\"format\": \"svmif-svr-model\""));
    CHECK(contains(text, "\"version\": 1"));
}

TEST_CASE("version mismatch names both versions") {
    std::string text = serialize(sample_svr());
    const auto pos = text.find("\"version\": 1");
    text.replace(pos, 12, "\"version\": 7");
    const std::string msg = message_of([&] { parse_model(text); });
    CHECK(contains(msg, "7"));
    CHECK(contains(msg, "1"));
    CHECK_THROWS_AS(parse_model(text), FormatError);
}

TEST_CASE("truncated files report the line") {
    const std::string text = serialize(sample_svr());
    const std::string cut = text.substr(0, text.size() / 2);
    CHECK_THROWS_AS(parse_model(cut), FormatError);
    CHECK(contains(message_of([&] { parse_model(cut); }), "line "));
}

TEST_CASE("malformed model content is a format error") {
    CHECK_THROWS_AS(parse_model(R"({"format": "something-else", "version": 1})"), FormatError);
    CHECK_THROWS_AS(parse_model(R"({"version": 1})"), FormatError);
    CHECK_THROWS_AS(parse_model(R"({"format": "svmif-fuzzy-model", "version": 1, "mode": "normalized",
        "dimension": 1, "rules": [{"antecedents": [{"center": 0, "width": -1}], "consequent": 1}]})"),
                    FormatError);
    CHECK_THROWS_AS(parse_model(R"({"format": "svmif-svr-model", "version": 1, "kernel": "plain_gaussian",
        "dimension": 2, "bias": 0, "support_vectors": [{"x": [1], "beta": 1, "widths": [1]}]})"),
                    FormatError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), InputError);
}

TEST_CASE("model file prediction dispatches on content") {
    const SvrModel m = sample_svr();
    const std::vector<double> x{0.2, 0.9};
    CHECK(predict(ModelFile{m, std::nullopt}, x) == predict(m, x));
    SvrModel plain = m;
    plain.bias = 0.0;
    plain.kernel.kind = KernelKind::PlainGaussian;
    const FuzzyRuleBase rb = from_svr(plain);
    CHECK(predict(ModelFile{rb, std::nullopt}, x) == infer(rb, x));
}

TEST_CASE("run config defaults and sections") {
    const RunConfig cfg = parse_run_config(minimal_config);
    CHECK(cfg.mackey_glass.tau == 30.0);
    CHECK(cfg.mackey_glass.b_exp == 10.0);
    CHECK(cfg.extraction.k == ExtractionConfig{}.k);
    CHECK(cfg.seed == 1);

    const RunConfig full = parse_run_config(R"({
        "seed": 42,
        "mackey_glass": {"tau": 17, "a": 0.2, "b": 10, "c": 0.1, "washout": 10, "n_samples": 50},
        "svr": {"C": 3, "fix_bias_to_zero": false},
        "extraction": {"k": 0.7, "refine_epochs": 0},
        "refine": {"delta": 0.01, "similarity_bound": 0.5}
    })");
    CHECK(full.seed == 42);
    CHECK(full.extraction.seed == 42);
    CHECK(full.refine.shuffle_seed == 42);
    CHECK(full.mackey_glass.tau == 17.0);
    CHECK(full.mackey_glass.n_samples == 50);
    CHECK(full.svr.C == 3.0);
    CHECK_FALSE(full.svr.fix_bias_to_zero);
    CHECK(full.extraction.k == 0.7);
    CHECK(full.extraction.refine_epochs == 0);
    CHECK(full.refine.similarity_bound == 0.5);
}

TEST_CASE("config errors name the field") {
    const std::string missing_tau = R"({"mackey_glass": {"a": 0.2, "b": 10, "c": 0.1}})";
    CHECK_THROWS_AS(parse_run_config(missing_tau), InputError);
    CHECK(contains(message_of([&] { parse_run_config(missing_tau); }), "tau"));

    const std::string typo = R"({"extraction": {"kk": 0.5}})";
    CHECK(contains(message_of([&] { parse_run_config(typo); }), "extraction.kk"));

    const std::string wrong_type = R"({"svr": {"C": "big"}})";
    CHECK(contains(message_of([&] { parse_run_config(wrong_type); }), "svr.C"));

    const std::string negative_count = R"({"extraction": {"refine_epochs": -1}})";
    CHECK(contains(message_of([&] { parse_run_config(negative_count); }), "refine_epochs"));

    CHECK_THROWS_AS(parse_run_config(R"({"extraction": {"k": 1.5}})"), InputError);
    CHECK_THROWS_AS(parse_run_config("{not json"), InputError);
    CHECK_THROWS_AS(parse_run_config(R"({"unknown": 1})"), InputError);
}

TEST_CASE("overrides replace file values") {
    const std::vector<std::string> o{"extraction.k=0.8", "seed=9", "svr.fix_bias_to_zero=false"};
    const RunConfig cfg = parse_run_config(minimal_config, o);
    CHECK(cfg.extraction.k == 0.8);
    CHECK(cfg.seed == 9);
    CHECK_FALSE(cfg.svr.fix_bias_to_zero);
    const std::vector<std::string> bad{"extraction.k"};
    CHECK_THROWS_AS(parse_run_config(minimal_config, bad), InputError);
}

TEST_CASE("trace layouts") {
    ExtractionReport r;
    r.iterations = {{0.01, 12, 5, 7, 0.5}};
    std::ostringstream a;
    write_extraction_trace(a, r);
    CHECK(a.str() == "# epsilon,support_vectors,rules,merges,mse\n0.01,12,5,7,0.5\n");

    std::ostringstream b;
    write_loss_trace(b, std::vector<double>{0.25, 0.125});
    CHECK(b.str() == "# epoch,mse\n1,0.25\n2,0.125\n");

    std::ostringstream c;
    write_prediction_trace(c, std::vector<double>{1.0, 2.0}, std::vector<double>{1.5, 2.5});
    CHECK(c.str() == "# t,target,prediction\n0,1,1.5\n1,2,2.5\n");
    CHECK_THROWS_AS(write_prediction_trace(c, std::vector<double>{1.0}, std::vector<double>{}), InputError);
}
