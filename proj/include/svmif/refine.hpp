#pragma once

#include "svmif/dataset.hpp"
#include "svmif/fuzzy.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace svmif {

struct RefineConfig {
    double delta = 0.05;      ///< learning rate
    std::size_t epochs = 10;  ///< passes over the data; 0 leaves the rules untouched
    /// Width floor applied after every step. 0 means default_min_sigma(data)
    /// in refine() and a floor of 1e-12 in a lone gradient_step.
    double min_sigma = 0.0;
    std::uint64_t shuffle_seed = 1;
    /// Antecedents that are identical within a dimension (shared linguistic
    /// terms after merging) move together, driven by their summed gradient.
    bool tie_shared_sets = true;
    /// When set, refine() shrinks (halving, up to `backtracking_halvings`
    /// times) or skips steps that would lift the largest per-dimension
    /// closed-form similarity above this bound.
    std::optional<double> similarity_bound;
    std::size_t backtracking_halvings = 6;

    void validate() const;
};

/// Gradient of the single-sample loss 0.5 * (y - f(x))^2 with respect to
/// every antecedent center and width, indexed [rule][dimension].
struct MembershipGradient {
    std::vector<std::vector<double>> center;
    std::vector<std::vector<double>> width;
};

MembershipGradient loss_gradient(const FuzzyRuleBase& rb, std::span<const double> x, double y);

/// One online descent step on (x, y): centers and widths move by
/// -delta * gradient, widths are clamped at min_sigma, consequents stay fixed.
FuzzyRuleBase gradient_step(const FuzzyRuleBase& rb, std::span<const double> x, double y,
                            const RefineConfig& cfg);

struct RefineResult {
    FuzzyRuleBase rules;
    std::vector<double> loss_trace; ///< training MSE after each epoch
    bool diverged = false;          ///< stopped early: epoch MSE above 10x the initial MSE
    std::size_t rejected_steps = 0; ///< steps skipped by the similarity guard
};

/// Runs `epochs` passes of gradient_step over `data` in a seeded shuffled order.
RefineResult refine(const FuzzyRuleBase& rb, const Dataset& data, const RefineConfig& cfg);

double mean_squared_error(const FuzzyRuleBase& rb, const Dataset& data);

/// 1e-3 times the widest per-dimension input range (at least 1e-12).
double default_min_sigma(const Dataset& data);

} // namespace svmif
