#include "svmif/fuzzy.hpp"

#include "svmif/error.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace svmif {

namespace {

constexpr double kCoverageFloor = 1e-300;

std::string two_decimals(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00") {
        s = "0.00";
    }
    return s;
}

} // namespace

double mf_eval(const GaussianMF& mf, double x) {
    const double z = (x - mf.center) / mf.width;
    return std::exp(-0.5 * z * z);
}

FuzzyRuleBase::FuzzyRuleBase(std::vector<FuzzyRule> rules, InferenceMode mode)
    : rules_(std::move(rules)), mode_(mode) {
    if (rules_.empty()) {
        throw InputError("rule base needs at least one rule");
    }
    input_dimension_ = rules_.front().antecedents.size();
    if (input_dimension_ == 0) {
        throw InputError("rules need at least one antecedent");
    }
    for (std::size_t j = 0; j < rules_.size(); ++j) {
        const FuzzyRule& r = rules_[j];
        if (r.antecedents.size() != input_dimension_) {
            throw InputError("rule " + std::to_string(j + 1) + " has " +
                             std::to_string(r.antecedents.size()) + " antecedents, expected " +
                             std::to_string(input_dimension_));
        }
        for (const GaussianMF& mf : r.antecedents) {
            if (!(mf.width > 0.0) || !std::isfinite(mf.center)) {
                throw InputError("rule " + std::to_string(j + 1) + " has an invalid membership function");
            }
        }
        if (!std::isfinite(r.consequent)) {
            throw InputError("rule " + std::to_string(j + 1) + " has a non-finite consequent");
        }
    }
}

double firing_strength(const FuzzyRule& rule, std::span<const double> x) {
    if (x.size() != rule.antecedents.size()) {
        throw InputError("input dimension " + std::to_string(x.size()) + " does not match rule dimension " +
                         std::to_string(rule.antecedents.size()));
    }
    double w = 1.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        w *= mf_eval(rule.antecedents[d], x[d]);
    }
    return w;
}

double infer(const FuzzyRuleBase& rb, std::span<const double> x) {
    double weighted = 0.0;
    double total = 0.0;
    for (const FuzzyRule& r : rb.rules()) {
        const double w = firing_strength(r, x);
        weighted += r.consequent * w;
        total += w;
    }
    if (rb.mode() == InferenceMode::Additive) {
        return weighted;
    }
    if (!(total > kCoverageFloor)) {
        throw CoverageError("no rule fires at the query point (incomplete rule base)");
    }
    return weighted / total;
}

FuzzyRuleBase from_svr(const SvrModel& model) {
    if (model.bias != 0.0) {
        throw InputError("rule extraction requires a model trained with zero bias");
    }
    if (model.support_vectors.empty()) {
        throw InputError("model has no support vectors to turn into rules");
    }
    std::vector<FuzzyRule> rules;
    rules.reserve(model.support_vectors.size());
    for (std::size_t j = 0; j < model.support_vectors.size(); ++j) {
        const SupportVector& sv = model.support_vectors[j];
        FuzzyRule rule;
        rule.consequent = sv.beta;
        for (std::size_t d = 0; d < sv.x.size(); ++d) {
            rule.antecedents.push_back({sv.x[d], model.kernel.widths[j][d]});
        }
        rules.push_back(std::move(rule));
    }
    const InferenceMode mode = model.kernel.kind == KernelKind::NormalizedGaussian
                                   ? InferenceMode::Normalized
                                   : InferenceMode::Additive;
    return FuzzyRuleBase(std::move(rules), mode);
}

SvrModel to_svr(const FuzzyRuleBase& rb) {
    SvrModel model;
    model.dimension = rb.input_dimension();
    model.kernel.kind = rb.mode() == InferenceMode::Normalized ? KernelKind::NormalizedGaussian
                                                               : KernelKind::PlainGaussian;
    for (const FuzzyRule& r : rb.rules()) {
        SupportVector sv;
        std::vector<double> widths;
        for (const GaussianMF& mf : r.antecedents) {
            sv.x.push_back(mf.center);
            widths.push_back(mf.width);
        }
        sv.beta = r.consequent;
        model.support_vectors.push_back(std::move(sv));
        model.kernel.widths.push_back(std::move(widths));
    }
    return model;
}

std::string format_rules(const FuzzyRuleBase& rb, std::span<const std::string> input_names) {
    if (!input_names.empty() && input_names.size() != rb.input_dimension()) {
        throw InputError("expected " + std::to_string(rb.input_dimension()) + " input names");
    }
    std::ostringstream out;
    for (std::size_t j = 0; j < rb.size(); ++j) {
        const FuzzyRule& r = rb.rule(j);
        out << 'R' << (j + 1) << ": if ";
        for (std::size_t d = 0; d < r.antecedents.size(); ++d) {
            if (d > 0) {
                out << " and ";
            }
            const std::string name = input_names.empty() ? "x" + std::to_string(d + 1) : input_names[d];
            out << name << " is Gaussmf(" << two_decimals(r.antecedents[d].width) << ", "
                << two_decimals(r.antecedents[d].center) << ')';
        }
        out << " then y is " << two_decimals(r.consequent) << '\n';
    }
    return out.str();
}

} // namespace svmif
