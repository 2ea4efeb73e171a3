#include "ddr/ka.hpp"
#include "ddr/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ddr;

namespace {

/// n = 2, m = 2, three nodes per function; see the hand evaluation below.
KaModel small_model()
{
    std::vector<PiecewiseLinear> inner{
        {0.0, 1.0, {0.0, 1.0, 2.0}},  // f11
        {0.0, 1.0, {1.0, 0.0, -1.0}}, // f12
        {0.0, 1.0, {0.2, 0.4, 0.0}},  // f21
        {0.0, 1.0, {0.0, 0.0, 1.0}},  // f22
    };
    std::vector<PiecewiseLinear> outer{
        {-1.0, 1.0, {1.0, 3.0, -1.0}}, // Phi1
        {0.0, 2.0, {0.0, 2.0, 10.0}},  // Phi2
    };
    return KaModel(2, 2, std::move(inner), std::move(outer), ColumnMap{0.0, 1.0});
}

KaModel random_model(std::size_t m, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<PiecewiseLinear> inner, outer;
    for (std::size_t i = 0; i < n * m; ++i) {
        std::vector<double> v(5);
        for (auto& x : v)
            x = rng.uniform(-0.3, 0.3);
        inner.emplace_back(0.0, 1.0, std::move(v));
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v(7);
        for (auto& x : v)
            x = rng.uniform(-1, 1);
        outer.emplace_back(-2.0, 2.0, std::move(v));
    }
    return KaModel(m, n, std::move(inner), std::move(outer), ColumnMap{0.0, 1.0});
}

} // namespace

TEST_CASE("piecewise-linear functions")
{
    const PiecewiseLinear f(0.0, 2.0, {1.0, 3.0, 2.0});
    CHECK(f.evaluate(0.0) == 1.0);
    CHECK(f.evaluate(0.5) == 2.0);
    CHECK(f.evaluate(1.5) == 2.5);
    CHECK(f.evaluate(-4.0) == 1.0); // clamped
    CHECK(f.evaluate(9.0) == 2.0);
    CHECK(f.slope(f.locate(0.25)) == 2.0);
    CHECK(f.slope(f.locate(1.75)) == -1.0);

    const auto r = PiecewiseLinear::ramp(-1.0, 1.0, 5, 0.0, 4.0);
    for (std::size_t i = 0; i < r.nodes(); ++i)
        CHECK(r.values()[i] == doctest::Approx(static_cast<double>(i)));

    auto g = f;
    g.resample(0.0, 4.0);
    // nodes move to 0, 2, 4 and take the old values there (clamped past 2)
    CHECK(g.nodes() == 3);
    CHECK(g.evaluate(0.0) == 1.0);
    CHECK(g.evaluate(2.0) == 2.0);
    CHECK(g.evaluate(4.0) == 2.0);
    CHECK(g.evaluate(1.0) == 1.5);
}

TEST_CASE("KA model evaluation by hand")
{
    // u1 = f11(0.25) + f12(0.75) = 0.5 - 0.5 = 0      Phi1(0)   = 3
    // u2 = f21(0.25) + f22(0.75) = 0.3 + 0.5 = 0.8    Phi2(0.8) = 1.6
    const auto m = small_model();
    const std::vector<double> x{0.25, 0.75};
    CHECK(m.inner_sum(0, x) == doctest::Approx(0.0));
    CHECK(m.inner_sum(1, x) == doctest::Approx(0.8));
    CHECK(m.predict(x) == doctest::Approx(4.6).epsilon(1e-14));
}

TEST_CASE("KA degenerate compositions")
{
    SUBCASE("zero inner, constant outer gives n c")
    {
        const std::size_t n = 4, m = 3;
        std::vector<PiecewiseLinear> inner(n * m, PiecewiseLinear(0.0, 1.0, {0.0, 0.0, 0.0}));
        std::vector<PiecewiseLinear> outer(n, PiecewiseLinear(-1.0, 1.0, {0.7, 0.7}));
        const KaModel model(m, n, inner, outer, ColumnMap{0.0, 1.0});
        CHECK(model.predict(std::vector<double>{0.1, 0.5, 0.9}) == doctest::Approx(2.8));
    }
    SUBCASE("identity chain reproduces x at the nodes")
    {
        const KaModel model(1, 1, {PiecewiseLinear::ramp(0.0, 1.0, 5, 0.0, 1.0)},
                            {PiecewiseLinear::ramp(0.0, 1.0, 7, 0.0, 1.0)}, ColumnMap{0.0, 1.0});
        for (double x : {0.0, 0.25, 0.5, 0.75, 1.0})
            CHECK(model.predict(std::vector<double>{x}) == doctest::Approx(x).epsilon(1e-15));
    }
}

TEST_CASE("KA analytic gradient matches central differences")
{
    Rng rng(17);
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        auto model = random_model(3, 7, trial);
        std::vector<double> x(3);
        for (auto& v : x)
            v = rng.uniform(0.02, 0.98);
        const auto g = model.gradient(x);
        REQUIRE(g.size() == model.parameter_count());
        const double h = 1e-6;
        for (std::size_t p = 0; p < g.size(); ++p) {
            double& v = model.parameter(p);
            const double saved = v;
            v = saved + h;
            const double up = model.evaluate_normalized(x);
            v = saved - h;
            const double down = model.evaluate_normalized(x);
            v = saved;
            const double fd = (up - down) / (2.0 * h);
            CHECK(std::abs(g[p] - fd) <= 1e-6 * std::max(1.0, std::abs(g[p])));
        }
    }
}

TEST_CASE("single KA updates")
{
    SUBCASE("zero residual changes nothing")
    {
        auto model = small_model();
        const std::vector<double> x{0.25, 0.75};
        const auto before = model.gradient(x);
        std::vector<double> params;
        for (std::size_t p = 0; p < model.parameter_count(); ++p)
            params.push_back(model.parameter(p));
        CHECK(ka_update_single(model, x, model.evaluate_normalized(x), 0.5) == 0.0);
        for (std::size_t p = 0; p < model.parameter_count(); ++p)
            CHECK(model.parameter(p) == params[p]);
        CHECK(model.gradient(x) == before);
    }
    SUBCASE("one addend, constant outer function, node hit: mu = 1 corrects fully")
    {
        // constant outer function has zero slope, so only the outer node at
        // u = 0 moves and the model is linear in it: y' = y + r
        KaModel model(1, 1, {PiecewiseLinear(0.0, 1.0, {0.0, 0.0})}, {PiecewiseLinear(-1.0, 1.0, {0.4, 0.4, 0.4})},
                      ColumnMap{0.0, 1.0});
        const std::vector<double> x{0.6};
        const double r = ka_update_single(model, x, 0.9, 1.0);
        CHECK(r == doctest::Approx(0.5));
        CHECK(model.evaluate_normalized(x) == doctest::Approx(0.9).epsilon(1e-15));
    }
    SUBCASE("residual shrinks for mu = 0.5")
    {
        for (std::uint64_t s = 0; s < 50; ++s) {
            auto model = random_model(2, 5, 100 + s);
            Rng rng(s);
            const std::vector<double> x{rng.uniform(), rng.uniform()};
            const double target = rng.uniform(-1, 1);
            const double r0 = ka_update_single(model, x, target, 0.5);
            const double r1 = target - model.evaluate_normalized(x);
            CHECK(std::abs(r1) < std::abs(r0));
        }
    }
}

TEST_CASE("KA initialization and the addend default")
{
    const auto m = KaModel::initial({}, 5, 3);
    CHECK(m.addends() == 11);
    KaParams p;
    p.addends = 4;
    CHECK(KaModel::initial(p, 5, 3).addends() == 4);
    CHECK(KaModel::initial({}, 5, 3).parameter_count() == 11 * 5 * 5 + 11 * 7);
}
