#pragma once

#include "svmif/dataset.hpp"
#include "svmif/extraction.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace svmif {

/// dx/dt = a x(t - tau) / (1 + x(t - tau)^b) - c x(t), constant history x0.
struct MackeyGlassConfig {
    double tau = 30.0;
    double a = 0.2;
    double b_exp = 10.0;
    double c_decay = 0.1;
    double dt = 0.1;
    double sample_every = 1.0;
    double x0 = 1.2;
    std::size_t washout = 1000;  ///< samples discarded before recording
    std::size_t n_samples = 2002;

    /// dt must divide tau and sample_every; tau must span at least three steps.
    void validate() const;
};

/// Fixed-step RK4 with a stored trajectory serving as the delay buffer;
/// delayed values off the grid come from cubic Lagrange interpolation.
/// A nonzero seed perturbs x0 by at most 1e-3. Throws NumericalError if the
/// state leaves the finite range.
std::vector<double> generate_mackey_glass(const MackeyGlassConfig& cfg, std::uint64_t seed = 0);

/// Lag-1/lag-2 regression pairs: input (s[i], s[i+1]), target s[i+2].
struct SupervisedSeries {
    std::vector<Sample> pairs;
    std::size_t split_index = 0;
    std::size_t test_size = 0;

    Dataset train() const;
    Dataset test() const;
};

/// Builds train_pairs + test_pairs consecutive pairs, training pairs first.
/// Throws InputError when the series is shorter than train + test + 2.
SupervisedSeries make_supervised(std::span<const double> series, std::size_t train_pairs = 500,
                                 std::size_t test_pairs = 500);

double rmse(std::span<const double> predictions, std::span<const double> targets);

std::vector<double> predict_all(const FuzzyRuleBase& rb, const Dataset& data);
std::vector<double> predict_all(const SvrModel& model, const Dataset& data);

/// Plain-kernel, free-bias SVR whose epsilon is raised in `epsilon_step`
/// increments until it keeps at most `budget` support vectors.
struct BudgetedSvr {
    SvrModel model;
    double epsilon = 0.0;
};
BudgetedSvr train_svr_with_budget(const Dataset& data, const ExtractionConfig& cfg,
                                  std::size_t budget);

struct ExperimentReport {
    InterpretableModel model;
    std::size_t rule_count = 0;
    double train_rmse = 0.0;
    double test_rmse = 0.0;
    double unrefined_test_rmse = 0.0; ///< selected iterate before refinement
    double raw_svr_epsilon = 0.0;
    std::size_t raw_svr_support_vectors = 0;
    double raw_svr_test_rmse = 0.0;   ///< plain SVR at the selected epsilon
    std::vector<double> test_targets;
    std::vector<double> test_predictions;
    std::string rules_text;           ///< rule listing with x(t-2), x(t-1) labels
};

/// Generates the series (seeded with cfg.seed), extracts and refines on the
/// 500 training pairs, scores the 500 test pairs, and trains the raw
/// comparison SVR at the selected epsilon.
ExperimentReport run_experiment(const MackeyGlassConfig& mg, const ExtractionConfig& cfg);

/// Two-column series files: "t,value" per line, '#' comments allowed.
std::vector<double> read_series(std::istream& in);
std::vector<double> read_series_file(const std::string& path);
void write_series(std::ostream& out, std::span<const double> series, double sample_every);

} // namespace svmif
