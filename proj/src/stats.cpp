#include "ddr/stats.hpp"

#include "ddr/text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ddr {

Ecdf::Ecdf(std::vector<double> sample) : values_(std::move(sample))
{
    if (values_.empty())
        throw StatsError("ECDF needs a non-empty sample");
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); }))
        throw StatsError("ECDF sample contains a non-finite value");
    std::sort(values_.begin(), values_.end());
}

double Ecdf::operator()(double t) const noexcept
{
    const auto count = std::upper_bound(values_.begin(), values_.end(), t) - values_.begin();
    return static_cast<double>(count) / static_cast<double>(values_.size());
}

Ecdf ecdf_from_sample(std::vector<double> sample) { return Ecdf(std::move(sample)); }

void write_ecdf_csv(std::ostream& out, const Ecdf& ecdf)
{
    out << "value,cumulative_probability\n";
    const auto v = ecdf.values();
    const auto n = static_cast<double>(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i + 1 < v.size() && v[i + 1] == v[i])
            continue;
        out << to_text(v[i]) << ',' << to_text(static_cast<double>(i + 1) / n) << '\n';
    }
}

double ks_critical_constant(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw StatsError("KS level alpha must lie in (0, 1)");
    if (alpha == 0.05)
        return ks_c_alpha_005;
    return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double ks_statistic(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty())
        throw StatsError("KS test needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const auto na = static_cast<double>(x.size());
    const auto nb = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // both ECDFs are evaluated just after each distinct merged value
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t)
            ++i;
        while (j < y.size() && y[j] == t)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    // once one sample is exhausted the remaining gap only shrinks toward 0
    return d;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha)
{
    KsResult r;
    r.statistic = ks_statistic(a, b);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    r.critical = ks_critical_constant(alpha) * std::sqrt((na + nb) / (na * nb));
    r.pass = r.statistic <= r.critical;
    return r;
}

double rmse(std::span<const double> predicted, std::span<const double> actual)
{
    if (predicted.size() != actual.size())
        throw StatsError("RMSE inputs differ in length");
    if (predicted.empty())
        throw StatsError("RMSE needs at least one value");
    double acc = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(predicted.size()));
}

double mean(std::span<const double> sample)
{
    if (sample.empty())
        throw StatsError("mean of an empty sample");
    double acc = 0.0;
    for (double v : sample)
        acc += v;
    return acc / static_cast<double>(sample.size());
}

MeanStd sample_mean_std(std::span<const double> sample)
{
    if (sample.size() < 2)
        throw StatsError("standard deviation needs at least two values");
    const double m = mean(sample);
    double acc = 0.0;
    for (double v : sample)
        acc += (v - m) * (v - m);
    return {m, std::sqrt(acc / static_cast<double>(sample.size() - 1))};
}

double pearson(std::span<const double> u, std::span<const double> v)
{
    if (u.size() != v.size())
        throw StatsError("Pearson inputs differ in length");
    if (u.size() < 2)
        throw StatsError("Pearson correlation needs at least two pairs");
    const double mu = mean(u);
    const double mv = mean(v);
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double du = u[i] - mu;
        const double dv = v[i] - mv;
        suv += du * dv;
        suu += du * du;
        svv += dv * dv;
    }
    if (suu == 0.0 || svv == 0.0)
        throw StatsError("Pearson correlation is undefined for a constant vector");
    return suv / std::sqrt(suu * svv);
}

// ---------------------------------------------------------------------------

void BetQuote::validate() const
{
    double total = 0.0;
    for (std::size_t r = 0; r < 3; ++r) {
        if (!(stake[r] > 0.0) || !(gain[r] > 0.0))
            throw StatsError("bet and gain amounts must be positive");
        if (!(probability[r] >= 0.0 && probability[r] <= 1.0))
            throw StatsError("outcome probabilities must lie in [0, 1]");
        total += probability[r];
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw StatsError("outcome probabilities must sum to 1");
}

std::array<double, 3> expected_profit(const BetQuote& quote)
{
    quote.validate();
    std::array<double, 3> m{};
    for (std::size_t r = 0; r < 3; ++r)
        m[r] = quote.probability[r] * quote.gain[r] - (1.0 - quote.probability[r]) * quote.stake[r];
    return m;
}

Outcome select_bet(const BetQuote& quote, bool allow_abstain)
{
    const auto m = expected_profit(quote);
    std::size_t best = 0;
    for (std::size_t r = 1; r < 3; ++r)
        if (m[r] > m[best])
            best = r;
    if (allow_abstain && m[best] < 0.0)
        return Outcome::abstain;
    return static_cast<Outcome>(best);
}

std::array<double, 3> probabilities_from_sample(std::span<const double> sample, double t_lo, double t_hi)
{
    if (sample.empty())
        throw StatsError("outcome probabilities need a non-empty sample");
    if (!(t_lo < t_hi))
        throw StatsError("outcome thresholds must satisfy t_lo < t_hi");
    std::size_t home = 0, away = 0;
    for (double v : sample) {
        if (v > t_hi)
            ++home;
        else if (v < t_lo)
            ++away;
    }
    const auto n = static_cast<double>(sample.size());
    const double ph = static_cast<double>(home) / n;
    const double pa = static_cast<double>(away) / n;
    return {ph, 1.0 - ph - pa, pa};
}

} // namespace ddr
