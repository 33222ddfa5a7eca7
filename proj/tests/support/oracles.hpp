#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "svmif/fuzzy.hpp"

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

// Jaccard overlap of two Gaussian sets of equal width sigma at center distance
// d, min intersection, integrated over the real line.
inline double jaccard_equal_width(double d, double sigma) {
    const double e = std::erfc(std::abs(d) / (2.0 * std::sqrt(2.0) * sigma));
    return e / (2.0 - e);
}

inline svmif::FuzzyRuleBase random_rulebase(std::mt19937_64& rng, std::size_t rules, std::size_t dims,
                                            svmif::InferenceMode mode, double center_span = 2.0) {
    std::uniform_real_distribution<double> center(-center_span, center_span);
    std::uniform_real_distribution<double> width(0.2, 1.0);
    std::uniform_real_distribution<double> consequent(-2.0, 2.0);
    std::vector<svmif::FuzzyRule> out(rules);
    for (auto& r : out) {
        for (std::size_t d = 0; d < dims; ++d) {
            r.antecedents.push_back({center(rng), width(rng)});
        }
        r.consequent = consequent(rng);
    }
    return svmif::FuzzyRuleBase(std::move(out), mode);
}

} // namespace oracle
