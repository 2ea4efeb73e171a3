#include "ddr/dataset.hpp"
#include "ddr/reference.hpp"
#include "ddr/rng.hpp"
#include "ddr/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ddr;

namespace {
std::vector<double> filled(double v) { return std::vector<double>(5, v); }
} // namespace

TEST_CASE("formula2 at the symmetric point is exactly one")
{
    const auto half = filled(0.5);
    CHECK(eval_formula2(half, half) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("formula2 matches a 40-digit evaluation")
{
    // reference values from an mpmath evaluation at 40 significant digits
    struct Case {
        std::vector<double> x, c;
        double y;
    };
    const std::vector<Case> cases{
        {{0.65, 0, 0.5, 0.5, 0.5}, filled(0.5), 1.8730020960318125988},
        {{0.74, 1, 0.5, 0.5, 1}, {0.1, 0.9, 0.3, 0.7, 0.2}, 0.98453022253986983025},
        {filled(0.0), filled(0.0), 0.029613174800505230011},
        {filled(1.0), filled(1.0), 2.9114650429051628937},
        {{0.25, 0.75, 0.1, 0.9, 0.4}, {0.8, 0.2, 0.6, 0.3, 0.95}, 0.24944998600101777156},
        {{0.0, 0.5, 0.5, 0.5, 0.5}, filled(0.5), 0.039660502538883005503},
    };
    for (const auto& c : cases)
        CHECK(eval_formula2(c.x, c.c) == doctest::Approx(c.y).epsilon(1e-13));
}

TEST_CASE("formula2 increases with c3 and rejects wrong lengths")
{
    const auto x = filled(0.5);
    auto c = filled(0.5);
    const double base = eval_formula2(x, c);
    c[2] += 0.1;
    CHECK(eval_formula2(x, c) > base);
    CHECK_THROWS_AS(eval_formula2(std::vector<double>(4, 0.5), c), std::invalid_argument);
}

TEST_CASE("synthetic generation is seeded and noise can be switched off")
{
    const auto a = generate_synthetic({0.4, 5, 7}, 1);
    const auto b = generate_synthetic({0.4, 5, 7}, 1);
    CHECK(a == b);
    CHECK(a.size() == 1);
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(generate_synthetic({0.4, 5, 8}, 1).fingerprint() != a.fingerprint());

    const auto d = generate_synthetic({0.0, 5, 3}, 10000);
    const auto half = filled(0.5);
    for (std::size_t i = 0; i < d.size(); i += 97)
        CHECK(d.output(i) == eval_formula2(d.input(i), half, 0.0));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (double v : d.input(i))
            REQUIRE((v >= 0.0 && v < 1.0));
}

TEST_CASE("oracle sample: noise-free collapse, mean at the symmetric point, reference kernel")
{
    const auto x = filled(0.5);
    const auto flat = oracle_sample(x, 1000, 1, 0.0);
    CHECK(flat.front() == flat.back());

    const auto s = oracle_sample(x, 100000, 11);
    REQUIRE(s.size() == 100000);
    CHECK(std::is_sorted(s.begin(), s.end()));
    const auto m = sample_mean_std(s);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * m.stddev / std::sqrt(100000.0));

    CHECK(oracle_sample(x, 10000, 5) == reference::oracle_sample(x, 10000, 5));
    CHECK(oracle_sample(x, 4097, 5) == reference::oracle_sample(x, 4097, 5));
}

TEST_CASE("dataset rejects bad records")
{
    Dataset d(2);
    d.add(std::vector<double>{1, 2}, 3);
    CHECK_THROWS_AS(d.add(std::vector<double>{1}, 3), DataError);
    CHECK_THROWS_AS(d.add(std::vector<double>{1, NAN}, 3), DataError);
    CHECK_THROWS_AS(d.add(std::vector<double>{1, 2}, INFINITY), DataError);
    CHECK(d.size() == 1);
    const auto r = d.record(0);
    CHECK(r.inputs == std::vector<double>{1, 2});
    CHECK(r.output == 3);
}

TEST_CASE("CSV parsing")
{
    SUBCASE("rows in file order, last column is the output")
    {
        std::istringstream in("a,b,y\n1,2,3\n4.5,-6,7e-1\n");
        const auto d = parse_csv(in);
        REQUIRE(d.size() == 2);
        CHECK(d.dim() == 2);
        CHECK(d.input(1)[0] == 4.5);
        CHECK(d.input(1)[1] == -6);
        CHECK(d.output(1) == 0.7);
        CHECK(d.column_names() == std::vector<std::string>{"a", "b", "y"});
    }
    SUBCASE("semicolon delimiter, quoted header, named output column")
    {
        std::istringstream in("\"fixed acidity\";\"quality\";\"alcohol\"\n7;6;9.4\n\n6.3;5;10.1\n");
        CsvOptions o;
        o.delimiter = ';';
        o.output_column = std::string("quality");
        const auto d = parse_csv(in, o);
        REQUIRE(d.size() == 2);
        CHECK(d.output(0) == 6);
        CHECK(d.input(0)[1] == 9.4);
    }
    SUBCASE("errors carry line numbers")
    {
        std::istringstream empty("");
        CHECK_THROWS_AS(parse_csv(empty), DataError);
        std::istringstream header_only("a,b\n");
        CHECK_THROWS_AS(parse_csv(header_only), DataError);
        std::istringstream ragged("a,b\n1,2\n3\n");
        CHECK_THROWS_WITH_AS(parse_csv(ragged), doctest::Contains("line 3"), DataError);
        std::istringstream text("a,b\n1,x\n");
        CHECK_THROWS_WITH_AS(parse_csv(text), doctest::Contains("line 2"), DataError);
        std::istringstream one_col("a\n1\n");
        CHECK_THROWS_AS(parse_csv(one_col), DataError);
    }
    SUBCASE("write then parse round-trips bit-exactly")
    {
        const auto d = generate_synthetic({}, 50);
        std::stringstream io;
        write_csv(io, d);
        CHECK(parse_csv(io) == d);
    }
}

TEST_CASE("normalization")
{
    Dataset d(2);
    d.add(std::vector<double>{2, 7}, 1);
    d.add(std::vector<double>{4, 7}, 3);
    d.add(std::vector<double>{3, 7}, 2);
    const auto [n, maps] = normalize(d);
    CHECK(n.input(0)[0] == 0.0);
    CHECK(n.input(1)[0] == 1.0);
    for (std::size_t i = 0; i < n.size(); ++i)
        CHECK(n.input(i)[1] == 0.5);
    CHECK(maps.denormalize_output(n.output(2)) == doctest::Approx(2.0));

    Rng rng(3);
    const ColumnMap m{-3.7, 12.25};
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform(-10, 20);
        CHECK(std::abs(m.inverse(m.forward(v)) - v) < 1e-12);
    }
}
