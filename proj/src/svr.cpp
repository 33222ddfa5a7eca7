#include "svmif/svr.hpp"

#include "svmif/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace svmif {

namespace {

constexpr double kCoverageFloor = 1e-300;

void check_same_dimension(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw InputError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
    }
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double soft_threshold(double z, double t) {
    if (z > t) {
        return z - t;
    }
    if (z < -t) {
        return z + t;
    }
    return 0.0;
}

// KKT violation of one coordinate when the bias is fixed; r is the residual.
double coordinate_violation(double beta, double r, double tube, double C) {
    if (beta == 0.0) {
        return std::max(0.0, std::abs(r) - tube);
    }
    if (beta >= C) {
        return std::max(0.0, tube - r);
    }
    if (beta <= -C) {
        return std::max(0.0, r + tube);
    }
    return beta > 0.0 ? std::abs(r - tube) : std::abs(r + tube);
}

BoxDualSolution solve_fixed_bias(const BoxDualProblem& p) {
    const Matrix& K = *p.kernel;
    const std::size_t n = p.targets.size();
    BoxDualSolution sol;
    sol.beta.assign(n, 0.0);
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = -p.targets[i];
    }

    while (true) {
        std::size_t worst = 0;
        double worst_violation = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = coordinate_violation(sol.beta[i], -grad[i], p.tube[i], p.C);
            if (v > worst_violation) {
                worst_violation = v;
                worst = i;
            }
        }
        sol.max_violation = worst_violation;
        if (worst_violation <= p.tolerance) {
            sol.converged = true;
            break;
        }
        if (sol.updates >= p.max_updates) {
            break;
        }

        const std::size_t i = worst;
        const double kii = std::max(K(i, i), 1e-12);
        const double z = kii * sol.beta[i] - grad[i];
        const double updated = std::clamp(soft_threshold(z, p.tube[i]) / kii, -p.C, p.C);
        const double step = updated - sol.beta[i];
        if (step == 0.0) {
            break; // stalled: no representable progress on the worst coordinate
        }
        sol.beta[i] = updated;
        for (std::size_t j = 0; j < n; ++j) {
            grad[j] += step * K(j, i);
        }
        ++sol.updates;
    }
    return sol;
}

// Exact minimizer of 0.5 a t^2 + p t + ei |bi + t| + ej |bj - t| over [lo, hi].
double pair_step(double a, double p, double bi, double bj, double ei, double ej, double lo,
                 double hi) {
    a = std::max(a, 1e-12);
    auto objective = [&](double t) {
        return 0.5 * a * t * t + p * t + ei * std::abs(bi + t) + ej * std::abs(bj - t);
    };
    std::vector<double> knots{lo};
    for (double b : {-bi, bj}) {
        if (b > lo && b < hi) {
            knots.push_back(b);
        }
    }
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());

    double best_t = 0.0;
    double best_value = objective(0.0);
    auto consider = [&](double t) {
        const double value = objective(t);
        if (value < best_value) {
            best_value = value;
            best_t = t;
        }
    };
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
        const double u = knots[s];
        const double v = knots[s + 1];
        const double mid = 0.5 * (u + v);
        const double si = sign_of(bi + mid);
        const double sj = sign_of(bj - mid);
        consider(u);
        consider(std::clamp(-(p + ei * si - ej * sj) / a, u, v));
    }
    consider(knots.back());
    return best_t;
}

BoxDualSolution solve_free_bias(const BoxDualProblem& p) {
    const Matrix& K = *p.kernel;
    const std::size_t n = p.targets.size();
    const double inf = std::numeric_limits<double>::infinity();
    BoxDualSolution sol;
    sol.beta.assign(n, 0.0);
    std::vector<double> grad(n);
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = -p.targets[i];
    }
    std::vector<double> up(n);
    std::vector<double> down(n);

    // Directional derivatives of raising beta_i and of lowering beta_j;
    // +inf marks a direction blocked by the box.
    auto refresh = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            const double b = sol.beta[i];
            up[i] = b < p.C ? grad[i] + (b >= 0.0 ? p.tube[i] : -p.tube[i]) : inf;
            down[i] = b > -p.C ? -grad[i] + (b > 0.0 ? -p.tube[i] : p.tube[i]) : inf;
        }
    };
    auto argmin_excluding = [](const std::vector<double>& v, std::size_t skip) {
        std::size_t best = v.size();
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (k != skip && (best == v.size() || v[k] < v[best])) {
                best = k;
            }
        }
        return best;
    };

    while (n >= 2) {
        refresh();
        const std::size_t i1 = argmin_excluding(up, n);
        const std::size_t j1 = argmin_excluding(down, i1);
        const std::size_t j2 = argmin_excluding(down, n);
        const std::size_t i2 = argmin_excluding(up, j2);
        auto pair_value = [&](std::size_t a, std::size_t b) {
            return (a < n && b < n) ? up[a] + down[b] : inf;
        };
        std::size_t i = i1;
        std::size_t j = j1;
        const double first = pair_value(i1, j1);
        const double second = pair_value(i2, j2);
        if (second < first ||
            (second == first && std::make_pair(i2, j2) < std::make_pair(i1, j1))) {
            i = i2;
            j = j2;
        }
        const double violation = i < n && j < n ? -(up[i] + down[j]) : 0.0;
        sol.max_violation = std::max(0.0, violation);
        if (!(violation > p.tolerance)) {
            sol.converged = true;
            break;
        }
        if (sol.updates >= p.max_updates) {
            break;
        }
        const double a = K(i, i) + K(j, j) - K(i, j) - K(j, i);
        const double lo = std::max(-p.C - sol.beta[i], sol.beta[j] - p.C);
        const double hi = std::min(p.C - sol.beta[i], sol.beta[j] + p.C);
        const double t = pair_step(a, grad[i] - grad[j], sol.beta[i], sol.beta[j], p.tube[i],
                                   p.tube[j], lo, hi);
        if (t == 0.0) {
            break;
        }
        // Land exactly on zero when the step crosses a kink.
        sol.beta[i] = (t == -sol.beta[i]) ? 0.0 : sol.beta[i] + t;
        sol.beta[j] = (t == sol.beta[j]) ? 0.0 : sol.beta[j] - t;
        for (std::size_t k = 0; k < n; ++k) {
            grad[k] += t * (K(k, i) - K(k, j));
        }
        ++sol.updates;
    }
    if (n < 2) {
        sol.converged = true;
    }

    // Bias from free support vectors, else the midpoint of the feasible interval.
    refresh();
    double sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double b = sol.beta[i];
        if (b != 0.0 && std::abs(b) < p.C) {
            sum += -grad[i] - p.tube[i] * sign_of(b);
            ++free_count;
        }
    }
    if (free_count > 0) {
        sol.bias = sum / static_cast<double>(free_count);
    } else {
        double lower = -inf;
        double upper = inf;
        for (std::size_t i = 0; i < n; ++i) {
            if (up[i] < inf) {
                lower = std::max(lower, -up[i]);
            }
            if (down[i] < inf) {
                upper = std::min(upper, down[i]);
            }
        }
        if (std::isfinite(lower) && std::isfinite(upper)) {
            sol.bias = 0.5 * (lower + upper);
        } else {
            sol.bias = std::isfinite(lower) ? lower : (std::isfinite(upper) ? upper : 0.0);
        }
    }
    return sol;
}

double normalization_sum(std::span<const double> x, std::span<const std::vector<double>> centers,
                         std::span<const std::vector<double>> widths) {
    double total = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        total += gaussian_kernel(centers[j], x, widths[j]);
    }
    return total;
}

void check_widths(std::span<const std::vector<double>> centers,
                  std::span<const std::vector<double>> widths) {
    if (centers.empty()) {
        throw InputError("center list is empty");
    }
    if (widths.size() != centers.size()) {
        throw InputError("expected one width vector per center");
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (widths[j].size() != centers[j].size() || centers[j].size() != centers[0].size()) {
            throw InputError("center/width dimension mismatch at center " + std::to_string(j));
        }
    }
}

} // namespace

std::vector<std::vector<double>> SvrModel::centers() const {
    std::vector<std::vector<double>> out;
    out.reserve(support_vectors.size());
    for (const SupportVector& sv : support_vectors) {
        out.push_back(sv.x);
    }
    return out;
}

void SvrTrainConfig::validate() const {
    if (!(C > 0.0)) {
        throw InputError("C must be positive");
    }
    if (!(epsilon >= 0.0)) {
        throw InputError("epsilon must be non-negative");
    }
    if (!(sigma > 0.0)) {
        throw InputError("sigma must be positive");
    }
    if (!(kkt_tolerance > 0.0)) {
        throw InputError("kkt_tolerance must be positive");
    }
}

double gaussian_kernel(std::span<const double> xi, std::span<const double> x, double sigma) {
    check_same_dimension(xi, x);
    if (!(sigma > 0.0)) {
        throw InputError("kernel width must be positive");
    }
    double sq = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = xi[d] - x[d];
        sq += diff * diff;
    }
    return std::exp(-sq / (2.0 * sigma * sigma));
}

double gaussian_kernel(std::span<const double> xi, std::span<const double> x,
                       std::span<const double> widths) {
    check_same_dimension(xi, x);
    check_same_dimension(xi, widths);
    double exponent = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (!(widths[d] > 0.0)) {
            throw InputError("kernel width must be positive");
        }
        const double z = (x[d] - xi[d]) / widths[d];
        exponent += z * z;
    }
    return std::exp(-0.5 * exponent);
}

double normalized_kernel(std::size_t index, std::span<const double> x,
                         std::span<const std::vector<double>> centers,
                         std::span<const std::vector<double>> widths) {
    check_widths(centers, widths);
    if (index >= centers.size()) {
        throw InputError("center index out of range");
    }
    const double denominator = normalization_sum(x, centers, widths);
    if (!(denominator > kCoverageFloor)) {
        throw CoverageError("normalized kernel: no center covers the query point");
    }
    return gaussian_kernel(centers[index], x, widths[index]) / denominator;
}

Matrix gram_matrix(const Dataset& data, double sigma) {
    const std::size_t n = data.size();
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        K(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = gaussian_kernel(data[i].x, data[j].x, sigma);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Matrix normalized_gram(std::span<const std::vector<double>> centers,
                       std::span<const std::vector<double>> widths) {
    check_widths(centers, widths);
    const std::size_t m = centers.size();
    Matrix D(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            D(i, j) = gaussian_kernel(centers[j], centers[i], widths[j]);
            row_sum += D(i, j);
        }
        for (std::size_t j = 0; j < m; ++j) {
            D(i, j) /= row_sum;
        }
    }
    return D;
}

Matrix modified_hessian(std::span<const std::vector<double>> centers,
                        std::span<const std::vector<double>> widths) {
    const Matrix D = normalized_gram(centers, widths);
    const std::size_t m = D.rows();
    Matrix H(2 * m, 2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            H(i, j) = D(i, j);
            H(i, j + m) = -D(i, j);
            H(i + m, j) = -D(i, j);
            H(i + m, j + m) = D(i, j);
        }
    }
    return H;
}

BoxDualSolution solve_box_dual(const BoxDualProblem& problem) {
    if (problem.kernel == nullptr) {
        throw InputError("dual problem has no kernel matrix");
    }
    const std::size_t n = problem.targets.size();
    if (problem.kernel->rows() != n || problem.kernel->cols() != n || problem.tube.size() != n) {
        throw InputError("dual problem dimensions disagree");
    }
    return problem.equality_constraint ? solve_free_bias(problem) : solve_fixed_bias(problem);
}

double dual_objective(const Matrix& kernel, std::span<const double> targets, double epsilon,
                      std::span<const double> beta) {
    const std::size_t n = beta.size();
    double quadratic = 0.0;
    double linear = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += kernel(i, j) * beta[j];
        }
        quadratic += beta[i] * row;
        linear += -targets[i] * beta[i] + epsilon * std::abs(beta[i]);
    }
    return 0.5 * quadratic + linear;
}

SvrTrainResult train_svr(const Dataset& data, const SvrTrainConfig& cfg) {
    cfg.validate();
    const std::size_t n = data.size();
    const Matrix K = gram_matrix(data, cfg.sigma);
    const std::vector<double> y = data.targets();
    const std::vector<double> tube(n, cfg.epsilon);
    const std::size_t passes = cfg.max_passes > 0 ? cfg.max_passes : 10 * n;

    BoxDualProblem problem;
    problem.kernel = &K;
    problem.targets = y;
    problem.tube = tube;
    problem.C = cfg.C;
    problem.equality_constraint = !cfg.fix_bias_to_zero;
    problem.tolerance = cfg.kkt_tolerance;
    problem.max_updates = passes * n;
    BoxDualSolution sol = solve_box_dual(problem);

    SvrTrainResult result;
    result.model.dimension = data.dimension();
    result.model.kernel.kind = KernelKind::PlainGaussian;
    result.model.bias = cfg.fix_bias_to_zero ? 0.0 : sol.bias;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.beta[i] != 0.0) {
            result.model.support_vectors.push_back({data[i].x, sol.beta[i]});
            result.model.kernel.widths.emplace_back(data.dimension(), cfg.sigma);
        }
    }
    result.beta = std::move(sol.beta);
    result.converged = sol.converged;
    result.updates = sol.updates;
    result.max_violation = sol.max_violation;
    return result;
}

SvrTrainResult fit_normalized_svr(std::vector<std::vector<double>> centers,
                                  std::vector<std::vector<double>> widths,
                                  std::vector<double> targets, const SvrTrainConfig& cfg) {
    cfg.validate();
    check_widths(centers, widths);
    if (targets.size() != centers.size()) {
        throw InputError("expected one target per center");
    }
    const std::size_t dimension = centers.front().size();

    SvrTrainResult result;
    while (!centers.empty()) {
        const std::size_t m = centers.size();
        const Matrix D = normalized_gram(centers, widths);
        const std::vector<double> tube(m, cfg.epsilon);
        const std::size_t passes = cfg.max_passes > 0 ? cfg.max_passes : 10 * m;

        BoxDualProblem problem;
        problem.kernel = &D;
        problem.targets = targets;
        problem.tube = tube;
        problem.C = cfg.C;
        problem.tolerance = cfg.kkt_tolerance;
        problem.max_updates = passes * m;
        BoxDualSolution sol = solve_box_dual(problem);
        result.converged = sol.converged;
        result.updates += sol.updates;
        result.max_violation = sol.max_violation;

        const auto zeros = static_cast<std::size_t>(std::count(sol.beta.begin(), sol.beta.end(), 0.0));
        if (zeros == 0 || zeros == m) {
            result.beta = zeros == m ? std::vector<double>{} : sol.beta;
            if (zeros == m) {
                centers.clear();
                widths.clear();
            }
            break;
        }
        std::vector<std::vector<double>> kept_centers;
        std::vector<std::vector<double>> kept_widths;
        std::vector<double> kept_targets;
        for (std::size_t j = 0; j < m; ++j) {
            if (sol.beta[j] != 0.0) {
                kept_centers.push_back(std::move(centers[j]));
                kept_widths.push_back(std::move(widths[j]));
                kept_targets.push_back(targets[j]);
            }
        }
        centers = std::move(kept_centers);
        widths = std::move(kept_widths);
        targets = std::move(kept_targets);
    }

    result.model.dimension = dimension;
    result.model.kernel.kind = KernelKind::NormalizedGaussian;
    result.model.bias = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
        result.model.support_vectors.push_back({centers[j], result.beta[j]});
    }
    result.model.kernel.widths = std::move(widths);
    return result;
}

double predict(const SvrModel& model, std::span<const double> x) {
    if (x.size() != model.dimension) {
        throw InputError("query dimension " + std::to_string(x.size()) +
                         " does not match model dimension " + std::to_string(model.dimension));
    }
    const auto& svs = model.support_vectors;
    const auto& widths = model.kernel.widths;
    if (svs.empty()) {
        return model.bias;
    }
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < svs.size(); ++i) {
        const double k = gaussian_kernel(svs[i].x, x, widths[i]);
        weighted += svs[i].beta * k;
        total += k;
    }
    if (model.kernel.kind == KernelKind::PlainGaussian) {
        return weighted + model.bias;
    }
    if (!(total > kCoverageFloor)) {
        throw CoverageError("normalized kernel: no support vector covers the query point");
    }
    return weighted / total + model.bias;
}

} // namespace svmif
