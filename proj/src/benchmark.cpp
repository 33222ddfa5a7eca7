#include "svmif/benchmark.hpp"

#include "svmif/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace svmif {

namespace {

bool divides(double step, double span) {
    const double ratio = span / step;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

// Trajectory stored on the uniform step grid, with constant history before t = 0.
class DelayBuffer {
public:
    DelayBuffer(double dt, double history, std::size_t reserve) : dt_(dt), history_(history) {
        values_.reserve(reserve);
    }

    void push(double v) { values_.push_back(v); }
    double back() const { return values_.back(); }

    double at(double t) const {
        if (t <= 0.0) {
            return history_;
        }
        const double pos = t / dt_;
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) < 1e-9) {
            return values_[static_cast<std::size_t>(nearest)];
        }
        const auto m = static_cast<std::ptrdiff_t>(std::floor(pos));
        const auto last = static_cast<std::ptrdiff_t>(values_.size()) - 1;
        // Four-point stencil kept inside [0, last] so it never straddles the
        // derivative jump at t = 0.
        std::ptrdiff_t first = std::max<std::ptrdiff_t>(0, m - 1);
        first = std::min(first, last - 3);
        if (first < 0) {
            const double frac = pos - static_cast<double>(m);
            return (1.0 - frac) * values_[static_cast<std::size_t>(m)] +
                   frac * values_[static_cast<std::size_t>(m + 1)];
        }
        double result = 0.0;
        for (std::ptrdiff_t i = first; i < first + 4; ++i) {
            double basis = 1.0;
            for (std::ptrdiff_t j = first; j < first + 4; ++j) {
                if (j != i) {
                    basis *= (pos - static_cast<double>(j)) / static_cast<double>(i - j);
                }
            }
            result += basis * values_[static_cast<std::size_t>(i)];
        }
        return result;
    }

private:
    double dt_;
    double history_;
    std::vector<double> values_;
};

} // namespace

void MackeyGlassConfig::validate() const {
    if (!(dt > 0.0)) {
        throw InputError("dt must be positive");
    }
    if (!(tau >= 3.0 * dt)) {
        throw InputError("tau must be at least three integration steps");
    }
    if (!(sample_every > 0.0)) {
        throw InputError("sample_every must be positive");
    }
    if (!divides(dt, tau) || !divides(dt, sample_every)) {
        throw InputError("dt must divide both tau and sample_every");
    }
    if (n_samples == 0) {
        throw InputError("n_samples must be positive");
    }
    if (!std::isfinite(x0) || !std::isfinite(a) || !std::isfinite(b_exp) || !std::isfinite(c_decay)) {
        throw InputError("Mackey-Glass parameters must be finite");
    }
}

std::vector<double> generate_mackey_glass(const MackeyGlassConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    double x0 = cfg.x0;
    if (seed != 0) {
        std::mt19937_64 rng(seed);
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
        x0 += 1e-3 * (2.0 * unit - 1.0);
    }
    const auto steps_per_sample = static_cast<std::size_t>(std::llround(cfg.sample_every / cfg.dt));
    const std::size_t total_samples = cfg.washout + cfg.n_samples;
    const std::size_t total_steps = (total_samples - 1) * steps_per_sample;

    auto rhs = [&](double x, double delayed) {
        return cfg.a * delayed / (1.0 + std::pow(delayed, cfg.b_exp)) - cfg.c_decay * x;
    };

    DelayBuffer buffer(cfg.dt, x0, total_steps + 1);
    buffer.push(x0);
    std::vector<double> out;
    out.reserve(cfg.n_samples);
    if (cfg.washout == 0) {
        out.push_back(x0);
    }
    for (std::size_t k = 0; k < total_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const double x = buffer.back();
        const double d0 = buffer.at(t - cfg.tau);
        const double dh = buffer.at(t + 0.5 * cfg.dt - cfg.tau);
        const double d1 = buffer.at(t + cfg.dt - cfg.tau);
        const double k1 = rhs(x, d0);
        const double k2 = rhs(x + 0.5 * cfg.dt * k1, dh);
        const double k3 = rhs(x + 0.5 * cfg.dt * k2, dh);
        const double k4 = rhs(x + cfg.dt * k3, d1);
        const double next = x + cfg.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(next)) {
            throw NumericalError("Mackey-Glass integration diverged at t = " + std::to_string(t));
        }
        buffer.push(next);
        if ((k + 1) % steps_per_sample == 0) {
            const std::size_t sample = (k + 1) / steps_per_sample;
            if (sample >= cfg.washout) {
                out.push_back(next);
            }
        }
    }
    return out;
}

Dataset SupervisedSeries::train() const {
    return Dataset(std::vector<Sample>(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(split_index)));
}

Dataset SupervisedSeries::test() const {
    const auto first = pairs.begin() + static_cast<std::ptrdiff_t>(split_index);
    return Dataset(std::vector<Sample>(first, first + static_cast<std::ptrdiff_t>(test_size)));
}

SupervisedSeries make_supervised(std::span<const double> series, std::size_t train_pairs,
                                 std::size_t test_pairs) {
    if (train_pairs == 0 || test_pairs == 0) {
        throw InputError("train and test pair counts must be positive");
    }
    const std::size_t needed = train_pairs + test_pairs + 2;
    if (series.size() < needed) {
        throw InputError("series has " + std::to_string(series.size()) + " values, need at least " +
                         std::to_string(needed));
    }
    SupervisedSeries out;
    out.split_index = train_pairs;
    out.test_size = test_pairs;
    for (std::size_t i = 0; i < train_pairs + test_pairs; ++i) {
        out.pairs.push_back({{series[i], series[i + 1]}, series[i + 2]});
    }
    return out;
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size()) {
        throw InputError("rmse: " + std::to_string(predictions.size()) + " predictions vs " +
                         std::to_string(targets.size()) + " targets");
    }
    if (predictions.empty()) {
        throw InputError("rmse of an empty sequence");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double r = predictions[i] - targets[i];
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<double>(predictions.size()));
}

std::vector<double> predict_all(const FuzzyRuleBase& rb, const Dataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const Sample& s : data) {
        out.push_back(infer(rb, s.x));
    }
    return out;
}

std::vector<double> predict_all(const SvrModel& model, const Dataset& data) {
    std::vector<double> out;
    out.reserve(data.size());
    for (const Sample& s : data) {
        out.push_back(predict(model, s.x));
    }
    return out;
}

BudgetedSvr train_svr_with_budget(const Dataset& data, const ExtractionConfig& cfg,
                                  std::size_t budget) {
    SvrTrainConfig svr;
    svr.C = cfg.C;
    svr.sigma = cfg.sigma_init;
    svr.kkt_tolerance = cfg.kkt_tolerance;
    svr.fix_bias_to_zero = false;
    svr.epsilon = cfg.epsilon_init;
    for (std::size_t it = 0;; ++it) {
        SvrTrainResult r = train_svr(data, svr);
        if (r.model.support_vectors.size() <= budget || it >= 10000) {
            return {std::move(r.model), svr.epsilon};
        }
        svr.epsilon += cfg.epsilon_step;
    }
}

ExperimentReport run_experiment(const MackeyGlassConfig& mg, const ExtractionConfig& cfg) {
    const std::vector<double> series = generate_mackey_glass(mg, cfg.seed);
    const SupervisedSeries pairs = make_supervised(series);
    const Dataset train = pairs.train();
    const Dataset test = pairs.test();

    ExperimentReport report{model_extraction(train, cfg)};
    const FuzzyRuleBase& rb = report.model.rulebase;
    report.rule_count = rb.size();
    report.test_targets = test.targets();
    report.test_predictions = predict_all(rb, test);
    report.train_rmse = rmse(predict_all(rb, train), train.targets());
    report.test_rmse = rmse(report.test_predictions, report.test_targets);

    ExtractionConfig unrefined = cfg;
    unrefined.refine_epochs = 0;
    const InterpretableModel before = model_extraction(train, unrefined);
    report.unrefined_test_rmse = rmse(predict_all(before.rulebase, test), report.test_targets);

    const auto& selected = report.model.report.iterations[report.model.report.selected_iteration];
    SvrTrainConfig svr;
    svr.C = cfg.C;
    svr.epsilon = selected.epsilon;
    svr.sigma = cfg.sigma_init;
    svr.kkt_tolerance = cfg.kkt_tolerance;
    svr.fix_bias_to_zero = false;
    const SvrTrainResult raw = train_svr(train, svr);
    report.raw_svr_epsilon = selected.epsilon;
    report.raw_svr_support_vectors = raw.model.support_vectors.size();
    report.raw_svr_test_rmse = rmse(predict_all(raw.model, test), report.test_targets);

    const std::vector<std::string> names{"x(t-2)", "x(t-1)"};
    report.rules_text = format_rules(rb, names);
    return report;
}

std::vector<double> read_series(std::istream& in) {
    std::vector<double> values;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const std::vector<double> fields = parse_delimited_line(line, line_number);
        if (fields.empty() || fields.size() > 2) {
            throw InputError("line " + std::to_string(line_number) + ": expected 't,value' or 'value'");
        }
        if (!std::isfinite(fields.back())) {
            throw InputError("line " + std::to_string(line_number) + ": non-finite value");
        }
        values.push_back(fields.back());
    }
    if (values.empty()) {
        throw InputError("series file holds no values");
    }
    return values;
}

std::vector<double> read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open series file '" + path + "'");
    }
    return read_series(in);
}

void write_series(std::ostream& out, std::span<const double> series, double sample_every) {
    std::ostringstream buf;
    buf << "# t,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < series.size(); ++i) {
        buf << static_cast<double>(i) * sample_every << ',' << series[i] << '\n';
    }
    out << buf.str();
}

} // namespace svmif
