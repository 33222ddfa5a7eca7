#include "svmif/io.hpp"

#include "svmif/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace svmif {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* svr_format = "svmif-svr-model";
constexpr const char* fuzzy_format = "svmif-fuzzy-model";

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("malformed ") + what + ": " + e.what());
    }
}

// Model files -------------------------------------------------------------------

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw FormatError(std::string("model file is missing field '") + key + "'");
    }
    return j.at(key);
}

double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) {
        throw FormatError(std::string("model field '") + key + "' must be a number");
    }
    return v.get<double>();
}

std::size_t count(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_unsigned()) {
        throw FormatError(std::string("model field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_array()) {
        throw FormatError(std::string("model field '") + key + "' must be an array");
    }
    std::vector<double> out;
    for (const json& e : v) {
        if (!e.is_number()) {
            throw FormatError(std::string("model field '") + key + "' must hold numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

const char* mode_name(InferenceMode mode) {
    return mode == InferenceMode::Normalized ? "normalized" : "additive";
}

const char* kernel_name(KernelKind kind) {
    return kind == KernelKind::NormalizedGaussian ? "normalized_gaussian" : "plain_gaussian";
}

ordered_json header(const char* format) {
    ordered_json j;
    j["format"] = format;
    j["version"] = model_format_version;
    return j;
}

ordered_json rules_json(const FuzzyRuleBase& rb) {
    ordered_json rules = ordered_json::array();
    for (const FuzzyRule& r : rb.rules()) {
        ordered_json antecedents = ordered_json::array();
        for (const GaussianMF& mf : r.antecedents) {
            antecedents.push_back({{"center", mf.center}, {"width", mf.width}});
        }
        rules.push_back({{"antecedents", antecedents}, {"consequent", r.consequent}});
    }
    return rules;
}

ordered_json fuzzy_json(const FuzzyRuleBase& rb) {
    ordered_json j = header(fuzzy_format);
    j["mode"] = mode_name(rb.mode());
    j["dimension"] = rb.input_dimension();
    j["rules"] = rules_json(rb);
    return j;
}

ordered_json report_json(const ExtractionReport& r) {
    ordered_json iterations = ordered_json::array();
    for (const ExtractionIterate& it : r.iterations) {
        iterations.push_back({{"epsilon", it.epsilon},
                              {"support_vectors", it.support_vectors},
                              {"rules", it.rules},
                              {"merges", it.merges},
                              {"training_error", it.training_error}});
    }
    ordered_json j;
    j["iterations"] = iterations;
    j["selected_iteration"] = r.selected_iteration;
    j["converged"] = r.converged;
    j["final_rule_count"] = r.final_rule_count;
    j["final_training_error"] = r.final_training_error;
    j["merges_performed"] = r.merges_performed;
    j["refine_trace"] = r.refine_trace;
    j["refinement_diverged"] = r.refinement_diverged;
    j["refinement_rejected_steps"] = r.refinement_rejected_steps;
    return j;
}

bool flag(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_boolean()) {
        throw FormatError(std::string("model field '") + key + "' must be true or false");
    }
    return v.get<bool>();
}

ExtractionReport report_from(const json& j) {
    ExtractionReport r;
    const json& iterations = field(j, "iterations");
    if (!iterations.is_array()) {
        throw FormatError("model field 'iterations' must be an array");
    }
    for (const json& it : iterations) {
        r.iterations.push_back({number(it, "epsilon"), count(it, "support_vectors"), count(it, "rules"),
                                count(it, "merges"), number(it, "training_error")});
    }
    r.selected_iteration = count(j, "selected_iteration");
    r.converged = flag(j, "converged");
    r.final_rule_count = count(j, "final_rule_count");
    r.final_training_error = number(j, "final_training_error");
    r.merges_performed = count(j, "merges_performed");
    r.refine_trace = numbers(j, "refine_trace");
    r.refinement_diverged = flag(j, "refinement_diverged");
    r.refinement_rejected_steps = count(j, "refinement_rejected_steps");
    return r;
}

FuzzyRuleBase fuzzy_from(const json& j) {
    const json& mode_field = field(j, "mode");
    InferenceMode mode;
    if (mode_field == "normalized") {
        mode = InferenceMode::Normalized;
    } else if (mode_field == "additive") {
        mode = InferenceMode::Additive;
    } else {
        throw FormatError("unknown inference mode " + mode_field.dump());
    }
    const std::size_t dimension = count(j, "dimension");
    const json& rules_field = field(j, "rules");
    if (!rules_field.is_array()) {
        throw FormatError("model field 'rules' must be an array");
    }
    std::vector<FuzzyRule> rules;
    for (const json& r : rules_field) {
        FuzzyRule rule;
        const json& antecedents = field(r, "antecedents");
        if (!antecedents.is_array() || antecedents.size() != dimension) {
            throw FormatError("every rule needs " + std::to_string(dimension) + " antecedents");
        }
        for (const json& a : antecedents) {
            rule.antecedents.push_back({number(a, "center"), number(a, "width")});
        }
        rule.consequent = number(r, "consequent");
        rules.push_back(std::move(rule));
    }
    try {
        return FuzzyRuleBase(std::move(rules), mode);
    } catch (const InputError& e) {
        throw FormatError(std::string("invalid rule base: ") + e.what());
    }
}

SvrModel svr_from(const json& j) {
    SvrModel m;
    const json& kernel = field(j, "kernel");
    if (kernel == "plain_gaussian") {
        m.kernel.kind = KernelKind::PlainGaussian;
    } else if (kernel == "normalized_gaussian") {
        m.kernel.kind = KernelKind::NormalizedGaussian;
    } else {
        throw FormatError("unknown kernel " + kernel.dump());
    }
    m.dimension = count(j, "dimension");
    m.bias = number(j, "bias");
    const json& svs = field(j, "support_vectors");
    if (!svs.is_array()) {
        throw FormatError("model field 'support_vectors' must be an array");
    }
    for (const json& sv : svs) {
        std::vector<double> x = numbers(sv, "x");
        std::vector<double> widths = numbers(sv, "widths");
        if (x.size() != m.dimension || widths.size() != m.dimension) {
            throw FormatError("support vector size does not match dimension " + std::to_string(m.dimension));
        }
        for (double w : widths) {
            if (!(w > 0.0)) {
                throw FormatError("support vector widths must be positive");
            }
        }
        m.support_vectors.push_back({std::move(x), number(sv, "beta")});
        m.kernel.widths.push_back(std::move(widths));
    }
    return m;
}

// Run configuration ---------------------------------------------------------------

class Section {
public:
    Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) {
            throw InputError("config section '" + name_ + "' must be an object");
        }
    }

    void real(const char* key, double& out, bool required = false) {
        if (const json* v = find(key, required)) {
            if (!v->is_number()) {
                throw InputError("config field '" + qualified(key) + "' must be a number");
            }
            out = v->get<double>();
        }
    }

    void integer(const char* key, std::size_t& out) {
        if (const json* v = find(key, false)) {
            if (!v->is_number_unsigned()) {
                throw InputError("config field '" + qualified(key) + "' must be a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = find(key, false)) {
            if (!v->is_boolean()) {
                throw InputError("config field '" + qualified(key) + "' must be true or false");
            }
            out = v->get<bool>();
        }
    }

    void optional_real(const char* key, std::optional<double>& out) {
        if (const json* v = find(key, false)) {
            if (v->is_null()) {
                out.reset();
            } else if (v->is_number()) {
                out = v->get<double>();
            } else {
                throw InputError("config field '" + qualified(key) + "' must be a number or null");
            }
        }
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw InputError("unknown config field '" + qualified(item.key().c_str()) + "'");
            }
        }
    }

private:
    const json* find(const char* key, bool required) {
        seen_.insert(key);
        if (!j_.contains(key)) {
            if (required) {
                throw InputError("config is missing required field '" + qualified(key) + "'");
            }
            return nullptr;
        }
        return &j_.at(key);
    }

    std::string qualified(const char* key) const { return name_ + "." + key; }

    const json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

template <typename Fn>
void with_section(const json& root, const char* name, bool required, Fn fn) {
    if (!root.contains(name)) {
        if (required) {
            throw InputError(std::string("config is missing section '") + name + "'");
        }
        return;
    }
    Section s(root.at(name), name);
    fn(s);
    s.finish();
}

void apply_override(json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw InputError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) {
        value = text;
    }
    const auto dot = path.find('.');
    if (dot == std::string::npos) {
        root[path] = value;
    } else {
        root[path.substr(0, dot)][path.substr(dot + 1)] = value;
    }
}

} // namespace

std::string serialize(const SvrModel& model) {
    ordered_json j = header(svr_format);
    j["kernel"] = kernel_name(model.kernel.kind);
    j["dimension"] = model.dimension;
    j["bias"] = model.bias;
    ordered_json svs = ordered_json::array();
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        svs.push_back({{"x", model.support_vectors[i].x},
                       {"beta", model.support_vectors[i].beta},
                       {"widths", model.kernel.widths[i]}});
    }
    j["support_vectors"] = svs;
    return j.dump(2) + "\n";
}

std::string serialize(const FuzzyRuleBase& rb) {
    return fuzzy_json(rb).dump(2) + "\n";
}

std::string serialize(const InterpretableModel& model) {
    ordered_json j = fuzzy_json(model.rulebase);
    j["report"] = report_json(model.report);
    return j.dump(2) + "\n";
}

std::string serialize(const ExtractionReport& report) {
    return report_json(report).dump(2) + "\n";
}

std::string serialize(const ExperimentReport& r) {
    ordered_json j;
    j["rule_count"] = r.rule_count;
    j["train_rmse"] = r.train_rmse;
    j["test_rmse"] = r.test_rmse;
    j["unrefined_test_rmse"] = r.unrefined_test_rmse;
    j["raw_svr_epsilon"] = r.raw_svr_epsilon;
    j["raw_svr_support_vectors"] = r.raw_svr_support_vectors;
    j["raw_svr_test_rmse"] = r.raw_svr_test_rmse;
    j["extraction"] = report_json(r.model.report);
    return j.dump(2) + "\n";
}

ModelFile parse_model(std::string_view text) {
    const json j = parse_json(text, "model file");
    const json& format = field(j, "format");
    const json& version = field(j, "version");
    if (!version.is_number_integer() || version.get<long long>() != model_format_version) {
        throw FormatError("model file version " + version.dump() + " is not supported (expected version " +
                          std::to_string(model_format_version) + ")");
    }
    if (format == svr_format) {
        return {svr_from(j), std::nullopt};
    }
    if (format == fuzzy_format) {
        ModelFile out{fuzzy_from(j), std::nullopt};
        if (j.contains("report")) {
            out.report = report_from(j.at("report"));
        }
        return out;
    }
    throw FormatError("unknown model format " + format.dump());
}

ModelFile load_model(const std::string& path) {
    return parse_model(read_text_file(path));
}

double predict(const ModelFile& file, std::span<const double> x) {
    if (const auto* svr = std::get_if<SvrModel>(&file.model)) {
        return predict(*svr, x);
    }
    return infer(std::get<FuzzyRuleBase>(file.model), x);
}

RunConfig parse_run_config(std::string_view text, std::span<const std::string> overrides) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    if (!root.is_object()) {
        throw InputError("config must be a JSON object");
    }
    for (const std::string& o : overrides) {
        apply_override(root, o);
    }

    RunConfig cfg;
    for (const auto& item : root.items()) {
        static const std::set<std::string> known{"seed", "mackey_glass", "svr", "extraction", "refine"};
        if (!known.count(item.key())) {
            throw InputError("unknown config field '" + item.key() + "'");
        }
    }
    if (root.contains("seed")) {
        if (!root.at("seed").is_number_unsigned()) {
            throw InputError("config field 'seed' must be a non-negative integer");
        }
        cfg.seed = root.at("seed").get<std::uint64_t>();
    }
    with_section(root, "mackey_glass", false, [&](Section& s) {
        MackeyGlassConfig& m = cfg.mackey_glass;
        s.real("tau", m.tau, true);
        s.real("a", m.a, true);
        s.real("b", m.b_exp, true);
        s.real("c", m.c_decay, true);
        s.real("dt", m.dt);
        s.real("sample_every", m.sample_every);
        s.real("x0", m.x0);
        s.integer("washout", m.washout);
        s.integer("n_samples", m.n_samples);
    });
    with_section(root, "svr", false, [&](Section& s) {
        SvrTrainConfig& m = cfg.svr;
        s.real("C", m.C);
        s.real("epsilon", m.epsilon);
        s.real("sigma", m.sigma);
        s.real("kkt_tolerance", m.kkt_tolerance);
        s.integer("max_passes", m.max_passes);
        s.boolean("fix_bias_to_zero", m.fix_bias_to_zero);
    });
    with_section(root, "extraction", false, [&](Section& s) {
        ExtractionConfig& m = cfg.extraction;
        s.real("C", m.C);
        s.real("epsilon_init", m.epsilon_init);
        s.real("sigma_init", m.sigma_init);
        s.real("epsilon_step", m.epsilon_step);
        s.real("tol", m.tol);
        s.real("k", m.k);
        s.integer("max_outer_iterations", m.max_outer_iterations);
        s.real("delta", m.delta);
        s.integer("refine_epochs", m.refine_epochs);
        s.real("kkt_tolerance", m.kkt_tolerance);
        s.real("min_sigma", m.min_sigma);
    });
    with_section(root, "refine", false, [&](Section& s) {
        RefineConfig& m = cfg.refine;
        s.real("delta", m.delta);
        s.integer("epochs", m.epochs);
        s.real("min_sigma", m.min_sigma);
        s.boolean("tie_shared_sets", m.tie_shared_sets);
        s.optional_real("similarity_bound", m.similarity_bound);
        s.integer("backtracking_halvings", m.backtracking_halvings);
    });
    cfg.extraction.seed = cfg.seed;
    cfg.refine.shuffle_seed = cfg.seed;

    cfg.mackey_glass.validate();
    cfg.svr.validate();
    cfg.extraction.validate();
    cfg.refine.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, std::span<const std::string> overrides) {
    return parse_run_config(read_text_file(path), overrides);
}

void write_extraction_trace(std::ostream& out, const ExtractionReport& report) {
    std::ostringstream buf;
    buf << "# epsilon,support_vectors,rules,merges,mse\n" << std::setprecision(17);
    for (const ExtractionIterate& it : report.iterations) {
        buf << it.epsilon << ',' << it.support_vectors << ',' << it.rules << ',' << it.merges << ','
            << it.training_error << '\n';
    }
    out << buf.str();
}

void write_loss_trace(std::ostream& out, std::span<const double> mse) {
    std::ostringstream buf;
    buf << "# epoch,mse\n" << std::setprecision(17);
    for (std::size_t i = 0; i < mse.size(); ++i) {
        buf << i + 1 << ',' << mse[i] << '\n';
    }
    out << buf.str();
}

void write_prediction_trace(std::ostream& out, std::span<const double> targets,
                            std::span<const double> predictions) {
    if (targets.size() != predictions.size()) {
        throw InputError("prediction trace needs one prediction per target");
    }
    std::ostringstream buf;
    buf << "# t,target,prediction\n" << std::setprecision(17);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        buf << i << ',' << targets[i] << ',' << predictions[i] << '\n';
    }
    out << buf.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write '" + path + "'");
        }
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) {
            throw InputError("failed writing '" + path + "'");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw InputError("cannot write '" + path + "'");
    }
}

} // namespace svmif
