#pragma once

#include "svmif/fuzzy.hpp"

namespace svmif {

struct SimilarityConfig {
    double quadrature_step = 1e-3;
    /// Integration window is the union of [c - m*sigma, c + m*sigma].
    double support_radius_multiplier = 6.0;

    void validate() const;
};

/// Jaccard overlap |A and B| / (|A| + |B| - |A and B|), with set measure the
/// integral of the membership, intersection the pointwise minimum, and the
/// integrals taken by the composite trapezoid rule.
double similarity_integral(const GaussianMF& a, const GaussianMF& b,
                           const SimilarityConfig& cfg = {});

/// Closed form s*exp(-d^2/s^2) / (2s - s*exp(-d^2/s^2)) with d the center
/// distance and s the mean of the two widths.
double similarity_gaussian(const GaussianMF& a, const GaussianMF& b);

/// Weighted merge: center is the weight-averaged center, width the
/// weight-averaged width plus half the center gap. Equal weights are used
/// when both weights are zero.
GaussianMF merge(const GaussianMF& a, const GaussianMF& b, double weight_a, double weight_b);

/// Largest closed-form similarity between two distinct antecedent sets of the
/// same input dimension; 0 when no dimension holds two distinct sets.
double max_pairwise_similarity(const FuzzyRuleBase& rb);

} // namespace svmif
