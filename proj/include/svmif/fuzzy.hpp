#pragma once

#include "svmif/svr.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace svmif {

struct GaussianMF {
    double center = 0.0;
    double width = 1.0;

    bool operator==(const GaussianMF&) const = default;
};

/// exp(-(x - c)^2 / (2 sigma^2)); 1 at the center.
double mf_eval(const GaussianMF& mf, double x);

/// One zero-order rule: IF x_1 is A_1 and ... and x_n is A_n THEN y is z.
/// The consequent is the peak position of the output set.
struct FuzzyRule {
    std::vector<GaussianMF> antecedents;
    double consequent = 0.0;

    bool operator==(const FuzzyRule&) const = default;
};

enum class InferenceMode {
    Normalized, ///< weighted mean of consequents by firing strength
    Additive,   ///< weighted sum, no normalizing denominator
};

class FuzzyRuleBase {
public:
    /// Throws InputError if `rules` is empty, a rule has the wrong antecedent
    /// count, or a width is not positive.
    FuzzyRuleBase(std::vector<FuzzyRule> rules, InferenceMode mode);

    std::span<const FuzzyRule> rules() const { return rules_; }
    const FuzzyRule& rule(std::size_t i) const { return rules_[i]; }
    std::size_t size() const { return rules_.size(); }
    InferenceMode mode() const { return mode_; }
    std::size_t input_dimension() const { return input_dimension_; }

    bool operator==(const FuzzyRuleBase&) const = default;

private:
    std::vector<FuzzyRule> rules_;
    InferenceMode mode_;
    std::size_t input_dimension_ = 0;
};

/// Product of the per-dimension memberships.
double firing_strength(const FuzzyRule& rule, std::span<const double> x);

/// Throws CoverageError in Normalized mode when the total firing strength is
/// below 1e-300 (no rule covers x).
double infer(const FuzzyRuleBase& rb, std::span<const double> x);

/// One rule per support vector: antecedent centers are the vector's
/// components, widths come from the kernel, consequent = beta. A plain kernel
/// maps to Additive inference, a normalized kernel to Normalized inference.
/// Throws InputError if the model has a nonzero bias or no support vectors.
FuzzyRuleBase from_svr(const SvrModel& model);

/// Inverse of from_svr for rule bases whose mode matches a kernel kind.
SvrModel to_svr(const FuzzyRuleBase& rb);

/// Rule listing, one line per rule:
///   R1: if x1 is Gaussmf(0.50, 1.00) and x2 is Gaussmf(...) then y is 2.00
/// Arguments of Gaussmf are (width, center). Values use two decimals.
/// `input_names` replaces the default x1..xn labels when non-empty.
std::string format_rules(const FuzzyRuleBase& rb, std::span<const std::string> input_names = {});

} // namespace svmif
