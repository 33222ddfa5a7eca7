#include "svmif/benchmark.hpp"
#include "svmif/error.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace svmif;

namespace {

// Independent reference: Euler-free RK4 at a given step with exact grid
// delays and the midpoint delay taken as the mean of its grid neighbours.
std::vector<double> reference_mackey_glass(double dt, std::size_t horizon) {
    const double tau = 30.0;
    const auto lag = static_cast<std::size_t>(std::llround(tau / dt));
    const auto per_unit = static_cast<std::size_t>(std::llround(1.0 / dt));
    const std::size_t steps = horizon * per_unit;
    std::vector<double> x(steps + 1, 1.2);
    auto hist = [&](std::ptrdiff_t i) { return i < 0 ? 1.2 : x[static_cast<std::size_t>(i)]; };
    auto f = [](double v, double d) { return 0.2 * d / (1.0 + std::pow(d, 10.0)) - 0.1 * v; };
    for (std::size_t k = 0; k < steps; ++k) {
        const auto back = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(lag);
        const double d0 = hist(back);
        const double d1 = hist(back + 1);
        const double dh = 0.5 * (d0 + d1);
        const double k1 = f(x[k], d0);
        const double k2 = f(x[k] + 0.5 * dt * k1, dh);
        const double k3 = f(x[k] + 0.5 * dt * k2, dh);
        const double k4 = f(x[k] + dt * k3, d1);
        x[k + 1] = x[k] + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    std::vector<double> out;
    for (std::size_t i = 0; i <= horizon; ++i) {
        out.push_back(x[i * per_unit]);
    }
    return out;
}

MackeyGlassConfig unwashed(std::size_t n) {
    MackeyGlassConfig cfg;
    cfg.washout = 0;
    cfg.n_samples = n;
    return cfg;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace

TEST_CASE("without feedback the series decays exponentially") {
    MackeyGlassConfig cfg = unwashed(200);
    cfg.a = 0.0;
    const std::vector<double> s = generate_mackey_glass(cfg);
    REQUIRE(s.size() == 200);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(s[i] - 1.2 * std::exp(-0.1 * static_cast<double>(i))) <= 1e-6);
    }
}

TEST_CASE("no feedback and no decay is constant") {
    MackeyGlassConfig cfg = unwashed(50);
    cfg.a = 0.0;
    cfg.c_decay = 0.0;
    for (double v : generate_mackey_glass(cfg)) {
        CHECK(v == 1.2);
    }
}

TEST_CASE("default configuration stays bounded and matches a fine-step reference") {
    const std::vector<double> s = generate_mackey_glass(unwashed(201));
    const std::vector<double> fine = reference_mackey_glass(0.01, 200);
    for (std::size_t i = 0; i < s.size(); ++i) {
        CAPTURE(i);
        CHECK(std::abs(s[i] - fine[i]) <= 1e-3);
    }
    const std::vector<double> full = generate_mackey_glass(MackeyGlassConfig{});
    CHECK(full.size() == 2002);
    for (double v : full) {
        CHECK(v > 0.2);
        CHECK(v < 1.4);
    }
}

TEST_CASE("halving the step shrinks the change at least fourfold") {
    auto run = [](double dt) {
        MackeyGlassConfig cfg = unwashed(101);
        cfg.dt = dt;
        return generate_mackey_glass(cfg);
    };
    const auto a = run(0.1);
    const auto b = run(0.05);
    const auto c = run(0.025);
    const double first = max_gap(a, b);
    const double second = max_gap(b, c);
    CHECK(first > 0.0);
    CHECK(first >= 4.0 * second);
}

TEST_CASE("seed perturbs the start value slightly and deterministically") {
    const MackeyGlassConfig cfg = unwashed(20);
    const auto base = generate_mackey_glass(cfg, 0);
    const auto s1 = generate_mackey_glass(cfg, 17);
    CHECK(generate_mackey_glass(cfg, 17) == s1);
    CHECK(base[0] == 1.2);
    CHECK(s1[0] != 1.2);
    CHECK(std::abs(s1[0] - 1.2) <= 1e-3);
}

TEST_CASE("integration blow-up is reported") {
    MackeyGlassConfig cfg = unwashed(200);
    cfg.a = 0.0;
    cfg.c_decay = -50.0;
    CHECK_THROWS_AS(generate_mackey_glass(cfg), NumericalError);
}

TEST_CASE("generator configuration is validated") {
    MackeyGlassConfig cfg;
    cfg.dt = 0.3;
    CHECK_THROWS_AS(generate_mackey_glass(cfg), InputError);
    cfg = {};
    cfg.sample_every = 0.25;
    cfg.dt = 0.1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.n_samples = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = {};
    cfg.tau = 0.1;
    CHECK_THROWS_AS(cfg.validate(), InputError);
}

TEST_CASE("supervised pairs use the two previous samples") {
    const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    const SupervisedSeries p = make_supervised(s, 1, 1);
    REQUIRE(p.pairs.size() == 2);
    CHECK(p.pairs[0].x == std::vector<double>{1.0, 2.0});
    CHECK(p.pairs[0].y == 3.0);
    CHECK(p.pairs[1].x == std::vector<double>{2.0, 3.0});
    CHECK(p.pairs[1].y == 4.0);

    const std::vector<double> flat(1002, 0.7);
    const SupervisedSeries q = make_supervised(flat);
    CHECK(q.pairs.size() == 1000);
    CHECK(q.train().size() == 500);
    CHECK(q.test().size() == 500);
    for (double t : q.test().targets()) {
        CHECK(t == 0.7);
    }
    CHECK_THROWS_AS(make_supervised(std::vector<double>(1001, 0.5)), InputError);
}

TEST_CASE("train and test pairs never overlap") {
    std::vector<double> s(1002);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = static_cast<double>(i);
    }
    const SupervisedSeries p = make_supervised(s);
    const Dataset train = p.train();
    const Dataset test = p.test();
    CHECK(train[train.size() - 1].y < test[0].x[0] + 2.0);
    CHECK(train[train.size() - 1].y == 501.0);
    CHECK(test[0].y == 502.0);
}

TEST_CASE("rmse examples") {
    const std::vector<double> a{0.5, -1.0, 2.0};
    CHECK(rmse(a, a) == 0.0);
    CHECK(rmse(std::vector<double>(4, 0.0), std::vector<double>(4, 1.0)) == 1.0);
    CHECK(rmse(std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 4.0}) == doctest::Approx(std::sqrt(12.5)));
    CHECK_THROWS_AS(rmse(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}), InputError);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), InputError);
}

TEST_CASE("rmse squared equals the training error of the same predictions") {
    const Dataset d({{{0.0}, 1.0}, {{1.0}, -2.0}, {{2.0}, 0.5}});
    auto f = [](std::span<const double> x) { return 0.3 * x[0]; };
    std::vector<double> pred;
    for (const Sample& s : d) {
        pred.push_back(f(s.x));
    }
    const double r = rmse(pred, d.targets());
    CHECK(r * r == doctest::Approx(training_error(f, d)).epsilon(1e-14));
}

TEST_CASE("series files round-trip") {
    const std::vector<double> s{1.2, 0.123456789012345678, 1e-9};
    std::stringstream buf;
    write_series(buf, s, 1.0);
    CHECK(read_series(buf) == s);
    std::istringstream bad("0,1\n1,2,3\n");
    CHECK_THROWS_AS(read_series(bad), InputError);
}

TEST_CASE("experiment: refinement improves the extracted model") {
    const ExperimentReport r = run_experiment(MackeyGlassConfig{}, ExtractionConfig{});
    CHECK(r.rule_count <= 9);
    CHECK(r.test_rmse < r.unrefined_test_rmse);
    CHECK(r.test_predictions.size() == 500);
    std::size_t lines = 0;
    for (char c : r.rules_text) {
        lines += c == '\n';
    }
    CHECK(lines == r.rule_count);
    CHECK(r.rules_text.rfind("R1: if x(t-2) is Gaussmf(", 0) == 0);

    const ExperimentReport again = run_experiment(MackeyGlassConfig{}, ExtractionConfig{});
    CHECK(again.test_predictions == r.test_predictions);
    CHECK(again.rules_text == r.rules_text);
}

TEST_CASE("experiment: loose tolerance collapses to very few rules") {
    ExtractionConfig cfg;
    cfg.tol = 1.0;
    const ExperimentReport r = run_experiment(MackeyGlassConfig{}, cfg);
    CHECK(r.rule_count <= 2);
    // frozen from the first verified run
    CHECK(r.test_rmse == doctest::Approx(0.5806).epsilon(0.1));
}
