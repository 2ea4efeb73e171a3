#ifndef DDR_STATS_HPP
#define DDR_STATS_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace ddr {

class StatsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Empirical CDF: F(t) = #{v <= t} / n. Right-continuous step function.
class Ecdf {
public:
    /// Throws StatsError on an empty or non-finite sample.
    explicit Ecdf(std::vector<double> sample);

    double operator()(double t) const noexcept;
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_; // sorted
};

Ecdf ecdf_from_sample(std::vector<double> sample);
inline double ecdf_eval(const Ecdf& ecdf, double t) { return ecdf(t); }

/// One (value, F(value)) row per distinct sample value, with a header line.
void write_ecdf_csv(std::ostream& out, const Ecdf& ecdf);

/// Asymptotic two-sample critical constant at alpha = 0.05.
inline constexpr double ks_c_alpha_005 = 1.3581;

struct KsResult {
    double statistic = 0.0; // D
    double critical = 0.0;  // c(alpha) sqrt((n+m)/(n m))
    bool pass = false;      // D <= critical
};

/// c(alpha) = sqrt(-ln(alpha/2)/2); returns the tabulated 1.3581 for 0.05.
double ks_critical_constant(double alpha);

/// Exact D by a merged sweep over both sorted samples.
double ks_statistic(std::span<const double> a, std::span<const double> b);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

double rmse(std::span<const double> predicted, std::span<const double> actual);
/// Throws StatsError if either vector is constant.
double pearson(std::span<const double> u, std::span<const double> v);

struct MeanStd {
    double mean = 0.0;
    double stddev = 0.0; // n-1 divisor
};
/// Needs at least 2 values.
MeanStd sample_mean_std(std::span<const double> sample);
double mean(std::span<const double> sample);

// ---------------------------------------------------------------------------
// bet selection

enum class Outcome { home = 0, draw = 1, away = 2, abstain = 3 };

/// Per outcome (home, draw, away): stake B, gain W on a win, probability P.
struct BetQuote {
    std::array<double, 3> stake{};
    std::array<double, 3> gain{};
    std::array<double, 3> probability{};

    /// Throws StatsError unless B > 0, W > 0, P in [0,1] and sum P = 1 (1e-9).
    void validate() const;
};

/// M = P W - (1 - P) B for each outcome.
std::array<double, 3> expected_profit(const BetQuote& quote);

/// Argmax of the expected profit; ties resolve home, then draw, then away.
/// With allow_abstain, returns Outcome::abstain when every profit is negative.
Outcome select_bet(const BetQuote& quote, bool allow_abstain = false);

/// (P_home, P_draw, P_away) from a goal-difference sample: home above t_hi,
/// away below t_lo, draw otherwise.
std::array<double, 3> probabilities_from_sample(std::span<const double> sample, double t_lo = -0.5,
                                                double t_hi = 0.5);

} // namespace ddr

#endif
