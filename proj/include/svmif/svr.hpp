#pragma once

#include "svmif/dataset.hpp"
#include "svmif/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace svmif {

enum class KernelKind { PlainGaussian, NormalizedGaussian };

/// Kernel family plus one width vector per support vector (one entry per input
/// dimension). Plain training fills every entry with the configured sigma;
/// widths only diverge after rule merging or refinement.
struct KernelConfig {
    KernelKind kind = KernelKind::PlainGaussian;
    std::vector<std::vector<double>> widths;
};

struct SupportVector {
    std::vector<double> x;
    double beta = 0.0; ///< alpha - alpha*, never zero for a stored vector
};

struct SvrModel {
    std::size_t dimension = 0;
    std::vector<SupportVector> support_vectors;
    double bias = 0.0;
    KernelConfig kernel;

    std::vector<std::vector<double>> centers() const;
};

struct SvrTrainConfig {
    double C = 10.0;
    double epsilon = 0.01;
    double sigma = 0.5;
    double kkt_tolerance = 1e-3;
    /// Full sweeps allowed (one sweep = l coordinate updates); 0 means 10 * l.
    std::size_t max_passes = 0;
    bool fix_bias_to_zero = true;

    /// Throws InputError on C <= 0, epsilon < 0, sigma <= 0 or tolerance <= 0.
    void validate() const;
};

struct SvrTrainResult {
    SvrModel model;
    /// Dual variables beta_i for every training point, zeros included.
    std::vector<double> beta;
    bool converged = false;
    std::size_t updates = 0;
    double max_violation = 0.0;
};

// Kernels ------------------------------------------------------------------

/// exp(-|xi - x|^2 / (2 sigma^2)).
double gaussian_kernel(std::span<const double> xi, std::span<const double> x, double sigma);

/// Product of per-dimension Gaussians, widths[d] applying to dimension d.
double gaussian_kernel(std::span<const double> xi, std::span<const double> x,
                       std::span<const double> widths);

/// Gaussian at centers[index] divided by the sum of all center Gaussians at x.
/// Throws CoverageError when the denominator underflows to zero.
double normalized_kernel(std::size_t index, std::span<const double> x,
                         std::span<const std::vector<double>> centers,
                         std::span<const std::vector<double>> widths);

Matrix gram_matrix(const Dataset& data, double sigma);

/// Row-normalized center Gram matrix: D'(i, j) = K_j(c_i) / sum_k K_k(c_i),
/// where K_j uses the widths of center j. Rows sum to one.
Matrix normalized_gram(std::span<const std::vector<double>> centers,
                       std::span<const std::vector<double>> widths);

/// The 2l x 2l Hessian [[D', -D'], [-D', D']] over (alpha, alpha*).
Matrix modified_hessian(std::span<const std::vector<double>> centers,
                        std::span<const std::vector<double>> widths);

// Dual solver ----------------------------------------------------------------

/// min_beta 0.5 beta' K beta - t' beta + sum_i tube_i |beta_i|,  -C <= beta_i <= C,
/// optionally with sum_i beta_i = 0 (free bias).
struct BoxDualProblem {
    const Matrix* kernel = nullptr;
    std::span<const double> targets;
    std::span<const double> tube;
    double C = 1.0;
    bool equality_constraint = false;
    double tolerance = 1e-3;
    std::size_t max_updates = 0;
};

struct BoxDualSolution {
    std::vector<double> beta;
    double bias = 0.0;
    bool converged = false;
    std::size_t updates = 0;
    double max_violation = 0.0;
};

/// Coordinate solver. Without the equality constraint each step exactly
/// minimizes one coordinate, picking the largest KKT violator (lowest index on
/// ties). With it, the most violating pair moves along beta_i += t, beta_j -= t.
/// A non-symmetric kernel is accepted in the fixed-bias case, where the sweep
/// becomes projected Gauss-Seidel on the stationarity conditions.
BoxDualSolution solve_box_dual(const BoxDualProblem& problem);

double dual_objective(const Matrix& kernel, std::span<const double> targets, double epsilon,
                      std::span<const double> beta);

// Training and prediction ------------------------------------------------------

/// Trains an epsilon-SVR with the plain Gaussian kernel. Not reaching the KKT
/// tolerance within the pass budget is reported through `converged`, not thrown.
SvrTrainResult train_svr(const Dataset& data, const SvrTrainConfig& cfg);

/// Re-solves consequent weights over fixed centers with the normalized kernel,
/// fitting `targets` at the centers within the epsilon tube. Centers whose
/// weight comes out zero are dropped and the remainder re-solved, so every
/// center of the returned model is a support vector. `beta` in the result is
/// aligned with the returned model, not with the input centers.
SvrTrainResult fit_normalized_svr(std::vector<std::vector<double>> centers,
                                  std::vector<std::vector<double>> widths,
                                  std::vector<double> targets, const SvrTrainConfig& cfg);

double predict(const SvrModel& model, std::span<const double> x);

} // namespace svmif
