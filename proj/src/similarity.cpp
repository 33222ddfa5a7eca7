#include "svmif/similarity.hpp"

#include "svmif/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace svmif {

void SimilarityConfig::validate() const {
    if (!(quadrature_step > 0.0)) {
        throw InputError("quadrature_step must be positive");
    }
    if (!(support_radius_multiplier >= 4.0)) {
        throw InputError("support_radius_multiplier must be at least 4");
    }
}

double similarity_integral(const GaussianMF& a, const GaussianMF& b, const SimilarityConfig& cfg) {
    cfg.validate();
    const double m = cfg.support_radius_multiplier;
    const double lo = std::min(a.center - m * a.width, b.center - m * b.width);
    const double hi = std::max(a.center + m * a.width, b.center + m * b.width);
    const auto intervals = static_cast<std::size_t>(std::ceil((hi - lo) / cfg.quadrature_step));
    const double h = (hi - lo) / static_cast<double>(intervals);

    double area_a = 0.0;
    double area_b = 0.0;
    double area_min = 0.0;
    for (std::size_t k = 0; k <= intervals; ++k) {
        const double x = lo + h * static_cast<double>(k);
        const double weight = (k == 0 || k == intervals) ? 0.5 : 1.0;
        const double va = mf_eval(a, x);
        const double vb = mf_eval(b, x);
        area_a += weight * va;
        area_b += weight * vb;
        area_min += weight * std::min(va, vb);
    }
    const double union_area = area_a + area_b - area_min;
    return union_area > 0.0 ? area_min / union_area : 0.0;
}

double similarity_gaussian(const GaussianMF& a, const GaussianMF& b) {
    const double s = 0.5 * (a.width + b.width);
    const double d = a.center - b.center;
    const double e = std::exp(-(d * d) / (s * s));
    return (s * e) / (2.0 * s - s * e);
}

GaussianMF merge(const GaussianMF& a, const GaussianMF& b, double weight_a, double weight_b) {
    if (a == b) {
        return a;
    }
    if (weight_a + weight_b <= 0.0) {
        weight_a = 1.0;
        weight_b = 1.0;
    }
    const double total = weight_a + weight_b;
    GaussianMF out;
    out.center = (weight_a * a.center + weight_b * b.center) / total;
    out.width = (weight_a * a.width + weight_b * b.width) / total +
                0.5 * std::abs(a.center - b.center);
    return out;
}

double max_pairwise_similarity(const FuzzyRuleBase& rb) {
    double worst = 0.0;
    std::vector<GaussianMF> sets;
    for (std::size_t d = 0; d < rb.input_dimension(); ++d) {
        sets.clear();
        for (const FuzzyRule& r : rb.rules()) {
            if (std::find(sets.begin(), sets.end(), r.antecedents[d]) == sets.end()) {
                sets.push_back(r.antecedents[d]);
            }
        }
        for (std::size_t i = 0; i < sets.size(); ++i) {
            for (std::size_t j = i + 1; j < sets.size(); ++j) {
                worst = std::max(worst, similarity_gaussian(sets[i], sets[j]));
            }
        }
    }
    return worst;
}

} // namespace svmif
