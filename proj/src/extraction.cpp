#include "svmif/extraction.hpp"

#include "svmif/error.hpp"
#include "svmif/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace svmif {

namespace {

struct Iterate {
    ExtractionIterate summary;
    std::optional<FuzzyRuleBase> rulebase;
};

Iterate run_iterate(const Dataset& data, const ExtractionConfig& cfg, double epsilon) {
    Iterate it;
    it.summary.epsilon = epsilon;

    SvrTrainConfig svr;
    svr.C = cfg.C;
    svr.epsilon = epsilon;
    svr.sigma = cfg.sigma_init;
    svr.kkt_tolerance = cfg.kkt_tolerance;
    svr.fix_bias_to_zero = true;
    const SvrTrainResult plain = train_svr(data, svr);
    it.summary.support_vectors = plain.model.support_vectors.size();
    if (plain.model.support_vectors.empty()) {
        return it;
    }

    const InterpretabilityResult merged = interpretability_test(from_svr(plain.model), cfg.k);
    it.summary.merges = merged.merges;

    // Re-express the plain model over the merged centers with the normalized kernel.
    const SvrModel layout = to_svr(merged.rules);
    std::vector<double> targets;
    for (const SupportVector& sv : layout.support_vectors) {
        targets.push_back(predict(plain.model, sv.x));
    }
    const SvrTrainResult rebuilt =
        fit_normalized_svr(layout.centers(), layout.kernel.widths, std::move(targets), svr);
    if (rebuilt.model.support_vectors.empty()) {
        return it;
    }
    FuzzyRuleBase rb = from_svr(rebuilt.model);
    it.summary.rules = rb.size();
    it.summary.training_error =
        training_error([&rb](std::span<const double> x) { return infer(rb, x); }, data);
    it.rulebase = std::move(rb);
    return it;
}

} // namespace

void ExtractionConfig::validate() const {
    if (!(C > 0.0)) {
        throw InputError("C must be positive");
    }
    if (!(epsilon_init >= 0.0)) {
        throw InputError("epsilon_init must be non-negative");
    }
    if (!(sigma_init > 0.0)) {
        throw InputError("sigma_init must be positive");
    }
    if (!(epsilon_step > 0.0)) {
        throw InputError("epsilon_step must be positive");
    }
    if (!(tol > 0.0)) {
        throw InputError("tol must be positive");
    }
    if (!(k > 0.0 && k < 1.0)) {
        throw InputError("k must lie in (0, 1)");
    }
    if (max_outer_iterations == 0) {
        throw InputError("max_outer_iterations must be positive");
    }
    if (!(delta > 0.0)) {
        throw InputError("delta must be positive");
    }
    if (!(kkt_tolerance > 0.0)) {
        throw InputError("kkt_tolerance must be positive");
    }
    if (!(min_sigma >= 0.0)) {
        throw InputError("min_sigma must be non-negative");
    }
}

InterpretabilityResult interpretability_test(const FuzzyRuleBase& rules, double k) {
    if (!(k > 0.0 && k < 1.0)) {
        throw InputError("similarity threshold k must lie in (0, 1)");
    }
    const std::size_t n_rules = rules.size();
    const std::size_t dims = rules.input_dimension();

    // Distinct sets per dimension, in first-appearance order, and each rule's
    // index into them.
    std::vector<std::vector<GaussianMF>> sets(dims);
    std::vector<std::vector<bool>> alive(dims);
    std::vector<std::vector<std::size_t>> uses(n_rules, std::vector<std::size_t>(dims));
    for (std::size_t d = 0; d < dims; ++d) {
        for (std::size_t r = 0; r < n_rules; ++r) {
            const GaussianMF& mf = rules.rule(r).antecedents[d];
            auto found = std::find(sets[d].begin(), sets[d].end(), mf);
            if (found == sets[d].end()) {
                sets[d].push_back(mf);
                alive[d].push_back(true);
                found = sets[d].end() - 1;
            }
            uses[r][d] = static_cast<std::size_t>(found - sets[d].begin());
        }
    }

    std::size_t merges = 0;
    while (true) {
        double best = -1.0;
        std::size_t best_d = 0;
        std::size_t best_i = 0;
        std::size_t best_j = 0;
        for (std::size_t d = 0; d < dims; ++d) {
            for (std::size_t i = 0; i < sets[d].size(); ++i) {
                if (!alive[d][i]) {
                    continue;
                }
                for (std::size_t j = i + 1; j < sets[d].size(); ++j) {
                    if (!alive[d][j]) {
                        continue;
                    }
                    const double s = similarity_gaussian(sets[d][i], sets[d][j]);
                    if (s > best) {
                        best = s;
                        best_d = d;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
        }
        if (!(best > k)) {
            break;
        }
        double weight_i = 0.0;
        double weight_j = 0.0;
        for (std::size_t r = 0; r < n_rules; ++r) {
            if (uses[r][best_d] == best_i) {
                weight_i += std::abs(rules.rule(r).consequent);
            } else if (uses[r][best_d] == best_j) {
                weight_j += std::abs(rules.rule(r).consequent);
            }
        }
        sets[best_d][best_i] = merge(sets[best_d][best_i], sets[best_d][best_j], weight_i, weight_j);
        alive[best_d][best_j] = false;
        for (std::size_t r = 0; r < n_rules; ++r) {
            if (uses[r][best_d] == best_j) {
                uses[r][best_d] = best_i;
            }
        }
        ++merges;
    }

    // Fuse rules whose antecedent tuples coincide.
    std::vector<FuzzyRule> fused;
    std::map<std::vector<std::size_t>, std::size_t> slot;
    for (std::size_t r = 0; r < n_rules; ++r) {
        auto [pos, inserted] = slot.try_emplace(uses[r], fused.size());
        if (inserted) {
            FuzzyRule rule;
            rule.consequent = rules.rule(r).consequent;
            for (std::size_t d = 0; d < dims; ++d) {
                rule.antecedents.push_back(sets[d][uses[r][d]]);
            }
            fused.push_back(std::move(rule));
        } else {
            fused[pos->second].consequent += rules.rule(r).consequent;
        }
    }
    return {FuzzyRuleBase(std::move(fused), rules.mode()), merges};
}

double training_error(const Predictor& f, const Dataset& data) {
    double sum = 0.0;
    for (const Sample& s : data) {
        const double r = f(s.x) - s.y;
        sum += r * r;
    }
    return sum / static_cast<double>(data.size());
}

InterpretableModel model_extraction(const Dataset& data, const ExtractionConfig& cfg) {
    cfg.validate();
    ExtractionReport report;
    std::optional<FuzzyRuleBase> selected;
    std::optional<FuzzyRuleBase> first;

    double epsilon = cfg.epsilon_init;
    for (std::size_t outer = 0; outer < cfg.max_outer_iterations; ++outer) {
        Iterate it = run_iterate(data, cfg, epsilon);
        if (!it.rulebase) {
            if (outer == 0) {
                throw DegenerateModelError(
                    "the first SVR has no support vectors; increase C or decrease epsilon_init");
            }
            break; // epsilon has grown past the target range
        }
        report.iterations.push_back(it.summary);
        if (outer == 0) {
            first = it.rulebase;
        }
        const bool within_tol = it.summary.training_error <= cfg.tol;
        if (within_tol) {
            selected = std::move(it.rulebase);
            report.selected_iteration = outer;
            report.converged = true;
        } else if (selected || outer == 0) {
            break;
        }
        if (it.summary.rules == 1) {
            break; // nothing left to simplify
        }
        epsilon += cfg.epsilon_step;
    }
    if (!selected) {
        selected = std::move(first);
        report.selected_iteration = 0;
    }
    report.merges_performed = report.iterations[report.selected_iteration].merges;

    RefineConfig rcfg;
    rcfg.delta = cfg.delta;
    rcfg.epochs = cfg.refine_epochs;
    rcfg.min_sigma = cfg.min_sigma;
    rcfg.shuffle_seed = cfg.seed;
    rcfg.similarity_bound = cfg.k;
    RefineResult refined = refine(*selected, data, rcfg);
    report.refine_trace = refined.loss_trace;
    report.refinement_diverged = refined.diverged;
    report.refinement_rejected_steps = refined.rejected_steps;

    InterpretableModel model{refined.diverged ? *selected : std::move(refined.rules), std::move(report)};
    model.report.final_rule_count = model.rulebase.size();
    model.report.final_training_error = mean_squared_error(model.rulebase, data);
    return model;
}

} // namespace svmif
