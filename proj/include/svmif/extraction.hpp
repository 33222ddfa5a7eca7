#pragma once

#include "svmif/dataset.hpp"
#include "svmif/fuzzy.hpp"
#include "svmif/refine.hpp"
#include "svmif/svr.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace svmif {

struct ExtractionConfig {
    double C = 10.0;
    double epsilon_init = 0.01;
    double sigma_init = 0.3;
    double epsilon_step = 0.01;
    double tol = 5e-4;    ///< bound on the training mean squared error
    double k = 0.9;       ///< similarity threshold for merging antecedent sets
    std::size_t max_outer_iterations = 50;
    double delta = 0.05;  ///< refinement learning rate
    std::size_t refine_epochs = 10;
    double kkt_tolerance = 1e-3;
    /// Refinement width floor; 0 selects 1e-3 times the largest input range.
    double min_sigma = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ExtractionIterate {
    double epsilon = 0.0;
    std::size_t support_vectors = 0; ///< of the plain-kernel model
    std::size_t rules = 0;           ///< after merging and the normalized rebuild
    std::size_t merges = 0;
    double training_error = 0.0;     ///< mean squared error of the rebuilt model
};

struct ExtractionReport {
    std::vector<ExtractionIterate> iterations;
    std::size_t selected_iteration = 0;
    bool converged = false; ///< selected iterate meets tol
    std::size_t final_rule_count = 0;
    double final_training_error = 0.0;
    std::size_t merges_performed = 0;
    std::vector<double> refine_trace;
    bool refinement_diverged = false;
    std::size_t refinement_rejected_steps = 0;
};

struct InterpretableModel {
    FuzzyRuleBase rulebase; ///< Normalized mode
    ExtractionReport report;
};

struct InterpretabilityResult {
    FuzzyRuleBase rules;
    std::size_t merges = 0;
};

/// Merges the most similar pair of antecedent sets within one input dimension
/// while that similarity exceeds k, pointing every rule that used either set
/// at the merged one. Rules left with identical antecedents in every
/// dimension are fused, adding their consequents. Afterwards no two distinct
/// sets of a dimension have closed-form similarity above k.
/// Throws InputError unless 0 < k < 1.
InterpretabilityResult interpretability_test(const FuzzyRuleBase& rules, double k);

using Predictor = std::function<double(std::span<const double>)>;

/// Mean squared residual of `f` over the dataset.
double training_error(const Predictor& f, const Dataset& data);

/// Sweeps epsilon upward from epsilon_init: train a zero-bias SVR, turn its
/// support vectors into rules, merge similar sets, rebuild the consequents
/// under the normalized kernel and measure the training error. The last
/// iterate meeting tol before the error first exceeds it is kept (or the
/// first iterate, flagged non-converged, when even that misses tol), then
/// its memberships are refined by gradient descent.
/// Throws DegenerateModelError if the first SVR has no support vectors.
InterpretableModel model_extraction(const Dataset& data, const ExtractionConfig& cfg);

} // namespace svmif
