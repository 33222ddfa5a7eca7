#include "svmif/refine.hpp"

#include "svmif/error.hpp"
#include "svmif/similarity.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace svmif {

namespace {

// Sums the gradient over antecedents that are identical within a dimension.
void tie_identical_sets(const FuzzyRuleBase& rb, MembershipGradient& g) {
    const std::size_t rules = rb.size();
    std::vector<bool> done(rules);
    for (std::size_t d = 0; d < rb.input_dimension(); ++d) {
        std::fill(done.begin(), done.end(), false);
        for (std::size_t i = 0; i < rules; ++i) {
            if (done[i]) {
                continue;
            }
            const GaussianMF& set = rb.rule(i).antecedents[d];
            double sum_center = 0.0;
            double sum_width = 0.0;
            std::vector<std::size_t> members;
            for (std::size_t j = i; j < rules; ++j) {
                if (!done[j] && rb.rule(j).antecedents[d] == set) {
                    members.push_back(j);
                    sum_center += g.center[j][d];
                    sum_width += g.width[j][d];
                    done[j] = true;
                }
            }
            for (std::size_t j : members) {
                g.center[j][d] = sum_center;
                g.width[j][d] = sum_width;
            }
        }
    }
}

FuzzyRuleBase apply_step(const FuzzyRuleBase& rb, const MembershipGradient& g, double step,
                         double min_sigma) {
    std::vector<FuzzyRule> rules(rb.rules().begin(), rb.rules().end());
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t d = 0; d < rules[i].antecedents.size(); ++d) {
            GaussianMF& mf = rules[i].antecedents[d];
            mf.center -= step * g.center[i][d];
            mf.width = std::max(min_sigma, mf.width - step * g.width[i][d]);
        }
    }
    return FuzzyRuleBase(std::move(rules), rb.mode());
}

MembershipGradient step_direction(const FuzzyRuleBase& rb, std::span<const double> x, double y,
                                  const RefineConfig& cfg) {
    MembershipGradient g = loss_gradient(rb, x, y);
    if (cfg.tie_shared_sets) {
        tie_identical_sets(rb, g);
    }
    return g;
}

std::size_t bounded_draw(std::mt19937_64& rng, std::size_t bound) {
    // Rejection sampling keeps the shuffle identical across standard libraries.
    const std::uint64_t range = bound;
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % range;
    std::uint64_t v = rng();
    while (v >= limit) {
        v = rng();
    }
    return static_cast<std::size_t>(v % range);
}

} // namespace

void RefineConfig::validate() const {
    if (!(delta > 0.0)) {
        throw InputError("refine delta must be positive");
    }
    if (!(min_sigma >= 0.0)) {
        throw InputError("refine min_sigma must be non-negative");
    }
    if (similarity_bound && !(*similarity_bound > 0.0 && *similarity_bound < 1.0)) {
        throw InputError("refine similarity_bound must lie in (0, 1)");
    }
}

MembershipGradient loss_gradient(const FuzzyRuleBase& rb, std::span<const double> x, double y) {
    const std::size_t rules = rb.size();
    const std::size_t dims = rb.input_dimension();
    if (x.size() != dims) {
        throw InputError("sample dimension does not match the rule base");
    }
    std::vector<std::vector<double>> membership(rules, std::vector<double>(dims));
    std::vector<double> firing(rules);
    double total = 0.0;
    double weighted = 0.0;
    for (std::size_t i = 0; i < rules; ++i) {
        double w = 1.0;
        for (std::size_t d = 0; d < dims; ++d) {
            membership[i][d] = mf_eval(rb.rule(i).antecedents[d], x[d]);
            w *= membership[i][d];
        }
        firing[i] = w;
        total += w;
        weighted += w * rb.rule(i).consequent;
    }
    const bool normalized = rb.mode() == InferenceMode::Normalized;
    if (normalized && !(total > 1e-300)) {
        throw CoverageError("no rule fires at the training sample");
    }
    const double output = normalized ? weighted / total : weighted;
    const double residual = y - output;

    MembershipGradient g;
    g.center.assign(rules, std::vector<double>(dims));
    g.width.assign(rules, std::vector<double>(dims));
    for (std::size_t i = 0; i < rules; ++i) {
        const double z = rb.rule(i).consequent;
        // d f / d firing_i
        const double sensitivity = normalized ? (z - output) / total : z;
        for (std::size_t d = 0; d < dims; ++d) {
            double others = 1.0;
            for (std::size_t e = 0; e < dims; ++e) {
                if (e != d) {
                    others *= membership[i][e];
                }
            }
            const GaussianMF& mf = rb.rule(i).antecedents[d];
            const double offset = x[d] - mf.center;
            const double sigma2 = mf.width * mf.width;
            const double d_mu_d_center = membership[i][d] * offset / sigma2;
            const double d_mu_d_width = membership[i][d] * offset * offset / (sigma2 * mf.width);
            const double chain = -residual * sensitivity * others;
            g.center[i][d] = chain * d_mu_d_center;
            g.width[i][d] = chain * d_mu_d_width;
        }
    }
    return g;
}

FuzzyRuleBase gradient_step(const FuzzyRuleBase& rb, std::span<const double> x, double y,
                            const RefineConfig& cfg) {
    cfg.validate();
    return apply_step(rb, step_direction(rb, x, y, cfg), cfg.delta, std::max(cfg.min_sigma, 1e-12));
}

double mean_squared_error(const FuzzyRuleBase& rb, const Dataset& data) {
    double sum = 0.0;
    for (const Sample& s : data) {
        const double r = s.y - infer(rb, s.x);
        sum += r * r;
    }
    return sum / static_cast<double>(data.size());
}

double default_min_sigma(const Dataset& data) {
    double widest = 0.0;
    for (std::size_t d = 0; d < data.dimension(); ++d) {
        double lo = data[0].x[d];
        double hi = lo;
        for (const Sample& s : data) {
            lo = std::min(lo, s.x[d]);
            hi = std::max(hi, s.x[d]);
        }
        widest = std::max(widest, hi - lo);
    }
    return std::max(1e-3 * widest, 1e-12);
}

RefineResult refine(const FuzzyRuleBase& rb, const Dataset& data, const RefineConfig& cfg) {
    cfg.validate();
    if (data.dimension() != rb.input_dimension()) {
        throw InputError("dataset dimension does not match the rule base");
    }
    RefineResult result{rb, {}, false, 0};
    if (cfg.epochs == 0) {
        return result;
    }
    const double min_sigma = cfg.min_sigma > 0.0 ? cfg.min_sigma : default_min_sigma(data);
    const double initial = mean_squared_error(rb, data);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.shuffle_seed);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (std::size_t k = order.size(); k > 1; --k) {
            std::swap(order[k - 1], order[bounded_draw(rng, k)]);
        }
        for (std::size_t idx : order) {
            const Sample& s = data[idx];
            const MembershipGradient g = step_direction(result.rules, s.x, s.y, cfg);
            if (!cfg.similarity_bound) {
                result.rules = apply_step(result.rules, g, cfg.delta, min_sigma);
                continue;
            }
            const double ceiling = std::max(*cfg.similarity_bound, max_pairwise_similarity(result.rules));
            double step = cfg.delta;
            bool accepted = false;
            for (std::size_t h = 0; h <= cfg.backtracking_halvings; ++h, step *= 0.5) {
                FuzzyRuleBase candidate = apply_step(result.rules, g, step, min_sigma);
                if (max_pairwise_similarity(candidate) <= ceiling) {
                    result.rules = std::move(candidate);
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                ++result.rejected_steps;
            }
        }
        const double mse = mean_squared_error(result.rules, data);
        result.loss_trace.push_back(mse);
        if (mse > 10.0 * initial && initial > 0.0) {
            result.diverged = true;
            break;
        }
    }
    return result;
}

} // namespace svmif
