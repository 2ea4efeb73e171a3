#include "ddr/rng.hpp"
#include "ddr/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ddr;

TEST_CASE("ECDF examples")
{
    const Ecdf f(std::vector<double>{1, 2, 3, 4});
    CHECK(f(2.5) == 0.5);
    CHECK(f(0.0) == 0.0);
    CHECK(f(4.0) == 1.0);
    CHECK(f(100.0) == 1.0);
    CHECK(ecdf_eval(ecdf_from_sample({1, 1, 2}), 1.0) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(Ecdf(std::vector<double>{}), StatsError);
    CHECK_THROWS_AS(Ecdf(std::vector<double>{1.0, NAN}), StatsError);
}

TEST_CASE("ECDF CSV has one row per distinct value")
{
    std::ostringstream o;
    write_ecdf_csv(o, Ecdf({2.0, 1.0, 2.0, 3.5}));
    CHECK(o.str() == "value,cumulative_probability\n1,0.25\n2,0.75\n3.5,1\n");
}

TEST_CASE("KS examples")
{
    const std::vector<double> a{0.3, 0.1, 0.7, 0.2};
    const auto same = ks_two_sample(a, a);
    CHECK(same.statistic == 0.0);
    CHECK(same.pass);
    const auto apart = ks_two_sample(std::vector<double>(20, 0.0), std::vector<double>(20, 1.0));
    CHECK(apart.statistic == 1.0);
    CHECK_FALSE(apart.pass);
    CHECK(apart.critical == doctest::Approx(1.3581 * std::sqrt(40.0 / 400.0)));
    // with three records each the critical value exceeds 1, so nothing is rejected
    CHECK(ks_two_sample(std::vector<double>{0, 0, 0}, std::vector<double>{1, 1, 1}).pass);
    // hand example: F_a steps at 1,2,3; F_b at 2.5, 3.5 -> sup gap 2/3 at t in [2, 2.5)
    CHECK(ks_statistic(std::vector<double>{1, 2, 3}, std::vector<double>{2.5, 3.5}) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, a), StatsError);
    CHECK(ks_critical_constant(0.05) == 1.3581);
    CHECK(ks_critical_constant(0.01) == doctest::Approx(1.6276).epsilon(1e-3));
    CHECK_THROWS_AS(ks_critical_constant(0.0), StatsError);
}

TEST_CASE("moments, RMSE and Pearson")
{
    const std::vector<double> u{1, 2, 3, 4};
    CHECK(rmse(u, u) == 0.0);
    CHECK(rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
    CHECK_THROWS_AS(rmse(u, std::vector<double>{1}), StatsError);
    CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), StatsError);

    std::vector<double> v;
    for (double x : u)
        v.push_back(2 * x + 1);
    CHECK(pearson(u, v) == doctest::Approx(1.0));
    CHECK_THROWS_AS(pearson(u, std::vector<double>(4, 3.0)), StatsError);
    CHECK_THROWS_AS(pearson(u, std::vector<double>{1, 2}), StatsError);

    const auto m = sample_mean_std(std::vector<double>{0, 2});
    CHECK(m.mean == 1.0);
    CHECK(m.stddev == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(sample_mean_std(std::vector<double>{1}), StatsError);
}

TEST_CASE("Pearson is invariant under positive affine maps")
{
    Rng rng(5);
    std::vector<double> a(300), b(300);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform();
        b[i] = a[i] + rng.uniform(-0.5, 0.5);
    }
    std::vector<double> a2(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        a2[i] = 3.5 * a[i] - 7.0;
    CHECK(std::abs(pearson(a, b) - pearson(a2, b)) < 1e-12);
}

TEST_CASE("expected profit and bet selection")
{
    BetQuote q;
    q.stake = {100, 100, 100};
    q.gain = {100, 80, 100};
    q.probability = {0.5, 0.5, 0.0};
    auto m = expected_profit(q);
    CHECK(m[0] == 0.0);
    CHECK(m[1] == doctest::Approx(-10.0));
    CHECK(m[2] == -100.0);

    q.probability = {0.0, 1.0, 0.0};
    CHECK(expected_profit(q)[1] == 80.0);

    q.probability = {0.4, 0.6, 0.0};
    CHECK(expected_profit(q)[1] == doctest::Approx(8.0));
    CHECK(select_bet(q) == Outcome::draw);

    // ties resolve home, then draw, then away
    q.gain = {100, 100, 100};
    q.probability = {0.5, 0.5, 0.0};
    CHECK(select_bet(q) == Outcome::home);
    q.probability = {0.0, 0.5, 0.5};
    CHECK(select_bet(q) == Outcome::draw);

    // abstain only behind the flag
    q.gain = {10, 10, 10};
    q.probability = {0.3, 0.3, 0.4};
    CHECK(select_bet(q) == Outcome::away);
    CHECK(select_bet(q, true) == Outcome::abstain);

    // common scaling of stakes and gains does not change the choice
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
        BetQuote r;
        const double p0 = rng.uniform(), p1 = rng.uniform() * (1 - p0);
        r.probability = {p0, p1, 1 - p0 - p1};
        for (int k = 0; k < 3; ++k) {
            r.stake[k] = rng.uniform(1, 100);
            r.gain[k] = rng.uniform(1, 300);
        }
        BetQuote s = r;
        for (int k = 0; k < 3; ++k) {
            s.stake[k] *= 4.0;
            s.gain[k] *= 4.0;
        }
        CHECK(select_bet(r) == select_bet(s));
    }

    BetQuote bad = q;
    bad.probability = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(expected_profit(bad), StatsError);
    bad = q;
    bad.stake[0] = 0.0;
    CHECK_THROWS_AS(select_bet(bad), StatsError);
}

TEST_CASE("outcome probabilities from a goal-difference sample")
{
    auto p = probabilities_from_sample(std::vector<double>(5, 2.0));
    CHECK(p == std::array<double, 3>{1.0, 0.0, 0.0});
    p = probabilities_from_sample(std::vector<double>{-1, 0, 1});
    CHECK(p[0] == doctest::Approx(1.0 / 3));
    CHECK(p[1] == doctest::Approx(1.0 / 3));
    CHECK(p[2] == doctest::Approx(1.0 / 3));

    Rng rng(12);
    std::vector<double> s(100000);
    for (auto& v : s)
        v = rng.uniform(-1, 1);
    p = probabilities_from_sample(s);
    CHECK(std::abs(p[0] - 0.25) < 0.02);
    CHECK(std::abs(p[1] - 0.5) < 0.02);
    CHECK(std::abs(p[2] - 0.25) < 0.02);
    CHECK_THROWS_AS(probabilities_from_sample(std::vector<double>{}), StatsError);
    CHECK_THROWS_AS(probabilities_from_sample(s, 0.5, -0.5), StatsError);
}
