#include "ddr/ensemble.hpp"
#include "ddr/json_io.hpp"
#include "ddr/reference.hpp"
#include "ddr/rng.hpp"
#include "ddr/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>

using namespace ddr;

namespace {

LearnerSpec linear_spec(std::uint64_t seed = 1)
{
    LearnerSpec s;
    s.kind = LearnerKind::linear;
    s.seed = seed;
    return s;
}

std::vector<std::size_t> sizes(const std::vector<Cluster>& cs)
{
    std::vector<std::size_t> out;
    for (const auto& c : cs)
        out.push_back(c.size());
    return out;
}

/// Two parallel lines y = 2x + 1 and y = 2x + 3 with uniform noise.
Dataset parallel_lines(std::size_t n, std::uint64_t seed)
{
    Dataset d(1);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        const double b = (i % 2 == 0) ? 1.0 : 3.0;
        d.add(std::vector<double>{x}, 2.0 * x + b + rng.uniform(-0.1, 0.1));
    }
    return d;
}

} // namespace

TEST_CASE("division schedules")
{
    CHECK(DivisionSchedule::parse("1, 2,3 ,5").counts() == std::vector<std::size_t>{1, 2, 3, 5});
    CHECK(DivisionSchedule::paper_default().counts() == std::vector<std::size_t>{1, 2, 3, 5, 7, 11, 17, 23, 29});
    CHECK(DivisionSchedule::doubling(4).counts() == std::vector<std::size_t>{1, 2, 4, 8});
    CHECK(DivisionSchedule::paper_default().to_string() == "1,2,3,5,7,11,17,23,29");
    CHECK_THROWS_AS(DivisionSchedule({}), ScheduleError);
    CHECK_THROWS_AS(DivisionSchedule({2, 3}), ScheduleError);
    CHECK_THROWS_AS(DivisionSchedule({1, 3, 3}), ScheduleError);
    CHECK_THROWS_AS(DivisionSchedule::parse("1,x"), ScheduleError);
    CHECK_NOTHROW(DivisionSchedule({1, 5}).validate_for(10));
    CHECK_THROWS_AS(DivisionSchedule({1, 6}).validate_for(10), ScheduleError);
}

TEST_CASE("consecutive splits and the remainder policy")
{
    CHECK(sizes(split_consecutive(10, 3)) == std::vector<std::size_t>{4, 3, 3});
    const auto two = split_consecutive(8, 2);
    CHECK(two[0] == Cluster{0, 4});
    CHECK(two[1] == Cluster{4, 8});

    const auto big = split_consecutive(1000000, 29);
    REQUIRE(big.size() == 29);
    CHECK(std::count_if(big.begin(), big.end(), [](const Cluster& c) { return c.size() == 34483; }) == 22);
    CHECK(std::count_if(big.begin(), big.end(), [](const Cluster& c) { return c.size() == 34482; }) == 7);
    CHECK(big.front().size() == 34483);
    CHECK(big.back().end == 1000000);

    CHECK(split_consecutive(5, 1).size() == 1);
    CHECK_THROWS_AS(split_consecutive(10, 6), ScheduleError);
}

TEST_CASE("resorting within clusters")
{
    SUBCASE("ascending residuals")
    {
        std::vector<std::size_t> order{10, 11, 12, 13};
        const std::vector<double> res{3, -1, 0, 2};
        const std::vector<Cluster> cs{{0, 4}};
        resort_by_residual(order, res, cs);
        CHECK(order == std::vector<std::size_t>{11, 12, 13, 10});
    }
    SUBCASE("equal residuals keep the order")
    {
        std::vector<std::size_t> order{4, 2, 9, 1};
        const std::vector<double> res(4, 0.5);
        const std::vector<Cluster> cs{{0, 4}};
        resort_by_residual(order, res, cs);
        CHECK(order == std::vector<std::size_t>{4, 2, 9, 1});
    }
    SUBCASE("records never cross cluster boundaries")
    {
        std::vector<std::size_t> order{0, 1, 2, 3};
        const std::vector<double> res{1, -1, 5, -5};
        const std::vector<Cluster> cs{{0, 2}, {2, 4}};
        resort_by_residual(order, res, cs);
        CHECK(order == std::vector<std::size_t>{1, 0, 3, 2});
    }
}

TEST_CASE("sliding windows")
{
    CHECK(SlidingWindowSpec{30000, 5000}.model_count(1000000) == 195);
    CHECK(SlidingWindowSpec{100, 1}.model_count(100) == 1);
    CHECK(SlidingWindowSpec{50, 25}.model_count(100) == 3);
    CHECK(SlidingWindowSpec{6000, 1000}.model_count(200000) == 195);
    CHECK_THROWS(SlidingWindowSpec{101, 1}.validate_for(100));
    CHECK_THROWS(SlidingWindowSpec{10, 0}.validate_for(100));
    CHECK_THROWS(SlidingWindowSpec{10, 11}.validate_for(100));

    // N = 100, r = 50, d = 25: model k equals a plain fit on positions [25k, 25k + 50)
    const auto data = parallel_lines(100, 3);
    const auto order = identity_order(100);
    const auto e = build_sliding_ensemble(data, order, {50, 25}, linear_spec());
    REQUIRE(e.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
        LearnerSpec s = linear_spec();
        s.seed = model_seed(1, sliding_seed_step, k);
        const auto direct = fit(s, RecordSpan(data, std::span(order).subspan(25 * k, 50))).model;
        CHECK(e.models()[k]->predict(std::vector<double>{0.3}) == direct->predict(std::vector<double>{0.3}));
    }
}

TEST_CASE("degenerate schedule is a plain fit")
{
    const auto data = generate_synthetic({0.4, 5, 4}, 3000);
    LearnerSpec spec;
    spec.seed = 12;
    const auto r = build_ensemble(data, DivisionSchedule({1}), spec);
    REQUIRE(r.ensemble.size() == 1);
    LearnerSpec s = spec;
    s.seed = model_seed(12, 1, 0);
    const auto order = identity_order(data.size());
    const auto plain = fit(s, RecordSpan(data, order)).model;
    const std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5};
    CHECK(r.ensemble.predict_sample(x) == std::vector<double>{plain->predict(x)});
    CHECK_THROWS_AS(r.ensemble.predict_sample(std::vector<double>{0.1}), LearnerError);
}

TEST_CASE("parallel lines: DDR separates, the random baseline averages")
{
    const auto data = parallel_lines(10000, 8);
    const auto ddr = build_ensemble(data, DivisionSchedule({1, 2}), linear_spec());
    REQUIRE(ddr.ensemble.size() == 2);
    std::vector<double> b;
    for (const auto& m : ddr.ensemble.models())
        b.push_back(dynamic_cast<const LinearModel&>(*m).intercept());
    CHECK(std::abs(b[0] - 1.0) < 0.15);
    CHECK(std::abs(b[1] - 3.0) < 0.15);
    const auto sample = ddr.ensemble.predict_sample(std::vector<double>{0.5});
    CHECK(sample[1] - sample[0] == doctest::Approx(2.0).epsilon(0.1));

    const auto rnd = build_random_disjoint_ensemble(data, 2, linear_spec(), 77);
    for (const auto& m : rnd.ensemble.models()) {
        CHECK(std::abs(dynamic_cast<const LinearModel&>(*m).intercept() - 2.0) < 0.3);
        for (double x : {0.0, 0.5, 1.0}) {
            const double y = m->predict(std::vector<double>{x});
            CHECK((y > 2.0 * x + 1.0 && y < 2.0 * x + 3.0));
        }
    }
}

TEST_CASE("random baseline with one cluster ignores the seed")
{
    const auto data = parallel_lines(500, 2);
    const auto a = build_random_disjoint_ensemble(data, 1, linear_spec(), 1);
    const auto b = build_random_disjoint_ensemble(data, 1, linear_spec(), 999);
    const std::vector<double> x{0.4};
    CHECK(a.ensemble.predict_sample(x)[0] == doctest::Approx(b.ensemble.predict_sample(x)[0]).epsilon(1e-12));
}

TEST_CASE("noise-free data gives a much narrower ensemble sample than noisy data")
{
    LearnerSpec spec;
    const auto schedule = DivisionSchedule({1, 2, 3, 5});
    const auto exact = build_ensemble(generate_synthetic({0.0, 5, 6}, 20000), schedule, spec);
    const auto noisy = build_ensemble(generate_synthetic({0.4, 5, 6}, 20000), schedule, spec);
    Rng rng(1);
    double exact_std = 0.0, noisy_std = 0.0;
    for (int p = 0; p < 50; ++p) {
        std::vector<double> x(5);
        for (auto& v : x)
            v = rng.uniform();
        exact_std += sample_mean_std(exact.ensemble.predict_sample(x)).stddev;
        noisy_std += sample_mean_std(noisy.ensemble.predict_sample(x)).stddev;
    }
    MESSAGE("mean sample std: noise-free " << exact_std / 50 << ", noisy " << noisy_std / 50);
    CHECK(exact_std <= 0.3 * noisy_std);
}

TEST_CASE("expectation and variance models")
{
    SUBCASE("uniform noise variance a^2/3")
    {
        const double a = 0.5;
        Dataset d(1);
        Rng rng(31);
        for (int i = 0; i < 100000; ++i) {
            const double x = rng.uniform();
            d.add(std::vector<double>{x}, x + rng.uniform(-a, a));
        }
        LearnerSpec spec;
        spec.seed = 4;
        const auto ev = fit_expectation_variance(d, spec);
        for (double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto e = ev.predict(std::vector<double>{x});
            CHECK(e.variance == doctest::Approx(a * a / 3.0).epsilon(0.2));
            CHECK(e.mean == doctest::Approx(x).epsilon(0.1));
        }
    }
    SUBCASE("noise-free data gives near-zero, non-negative variance")
    {
        Dataset d(1);
        for (int i = 0; i < 1000; ++i)
            d.add(std::vector<double>{i / 999.0}, 3.0 * i / 999.0 - 1.0);
        const auto ev = fit_expectation_variance(d, linear_spec());
        for (double x : {0.0, 0.5, 1.0}) {
            CHECK(ev.predict_variance(std::vector<double>{x}) >= 0.0);
            CHECK(ev.predict_variance(std::vector<double>{x}) < 1e-12);
        }
    }
    SUBCASE("negative raw variance is clamped and flagged")
    {
        const ExpectationVarianceModel ev(std::make_shared<LinearModel>(std::vector<double>{0.0}, 1.0),
                                          std::make_shared<LinearModel>(std::vector<double>{1.0}, -0.5));
        const auto e = ev.predict(std::vector<double>{0.2});
        CHECK(e.variance == 0.0);
        CHECK(e.clamped);
        CHECK_FALSE(ev.predict(std::vector<double>{0.9}).clamped);
    }
    SUBCASE("empty data")
    {
        CHECK_THROWS_AS(fit_expectation_variance(Dataset(2), linear_spec()), LearnerError);
    }
}

TEST_CASE("parallel kernels match the serial reference")
{
    const auto data = generate_synthetic({0.4, 5, 10}, 4000);
    LearnerSpec spec;
    spec.seed = 3;
    BuildOptions serial;
    serial.execution = Execution::serial;
    const auto a = build_ensemble(data, DivisionSchedule({1, 2, 3, 5}), spec);
    const auto b = build_ensemble(data, DivisionSchedule({1, 2, 3, 5}), spec, serial);
    CHECK(a.order == b.order);
    REQUIRE(a.steps.size() == b.steps.size());
    for (std::size_t j = 0; j < a.steps.size(); ++j)
        CHECK(a.steps[j].mean_abs_residual == b.steps[j].mean_abs_residual);

    const auto sa = build_sliding_ensemble(data, a.order, {1000, 500}, spec);
    const auto sb = build_sliding_ensemble(data, a.order, {1000, 500}, spec, Execution::serial);
    Dataset probes(5);
    Rng rng(2);
    for (int p = 0; p < 16; ++p) {
        std::vector<double> x(5);
        for (auto& v : x)
            v = rng.uniform();
        probes.add(x, 0.0);
    }
    CHECK(predict_samples(a.ensemble, probes) == reference::predict_samples(b.ensemble, probes));
    CHECK(predict_samples(sa, probes) == predict_samples(sb, probes, Execution::serial));
}

TEST_CASE("learner errors carry step and cluster")
{
    Dataset d(1);
    for (int i = 0; i < 20; ++i)
        d.add(std::vector<double>{1.0}, static_cast<double>(i));
    auto spec = linear_spec();
    spec.linear.ridge = 0.0; // constant input column: singular without a ridge
    CHECK_THROWS_WITH(build_ensemble(d, DivisionSchedule({1, 2}), spec), doctest::Contains("step 1, cluster 1"));
}

TEST_CASE("ensembles persist and reload for inference")
{
    const auto data = generate_synthetic({0.4, 5, 13}, 3000);
    LearnerSpec spec;
    spec.seed = 21;
    const auto r = build_ensemble(data, DivisionSchedule({1, 2, 3}), spec);

    StoredEnsemble stored;
    stored.manifest.learner = spec;
    stored.manifest.schedule = {1, 2, 3};
    stored.manifest.seed = 21;
    stored.manifest.records = data.size();
    stored.manifest.dataset_fingerprint = data.fingerprint();
    stored.manifest.normalization = NormalizationMaps::identity(5);
    stored.manifest.has_sliding = true;
    stored.manifest.sliding = {1000, 1000};
    stored.main = r.ensemble;
    stored.sliding = build_sliding_ensemble(data, r.order, stored.manifest.sliding, spec);

    const auto dir = std::filesystem::temp_directory_path() / "ddr_test_persist";
    std::filesystem::remove_all(dir);
    save_ensemble(dir, stored);
    const auto back = load_ensemble(dir);
    CHECK(back.manifest.dataset_fingerprint == data.fingerprint());
    CHECK(back.manifest.schedule == stored.manifest.schedule);
    CHECK(back.manifest.learner.seed == 21);
    CHECK(back.manifest.learner.kind == LearnerKind::kolmogorov_arnold);
    CHECK(back.sliding.size() == 3);
    const std::vector<double> x{0.3, 0.1, 0.9, 0.5, 0.2};
    CHECK(back.main.predict_sample(x) == r.ensemble.predict_sample(x));
    CHECK(back.sliding.predict_sample(x) == stored.sliding.predict_sample(x));
    std::filesystem::remove_all(dir);

    CHECK_THROWS(load_ensemble(dir));
}
