#ifndef DDR_KA_HPP
#define DDR_KA_HPP

#include "ddr/learner.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ddr {

/// Continuous piecewise-linear function with equidistant nodes on [lo, hi].
/// Arguments outside the domain are clamped to it.
class PiecewiseLinear {
public:
    /// Interval index and weight of the right node: value = (1-w) v[i] + w v[i+1].
    struct Bracket {
        std::size_t index;
        double weight;
    };

    PiecewiseLinear() = default;
    PiecewiseLinear(double lo, double hi, std::vector<double> values);

    /// Straight line from (lo, from) to (hi, to) sampled at q nodes.
    static PiecewiseLinear ramp(double lo, double hi, std::size_t q, double from, double to);

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t nodes() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double abscissa(std::size_t i) const noexcept { return lo_ + step_ * static_cast<double>(i); }

    Bracket locate(double t) const noexcept;
    double evaluate(double t) const noexcept;
    double evaluate(Bracket b) const noexcept { return (1.0 - b.weight) * values_[b.index] + b.weight * values_[b.index + 1]; }
    /// Slope of the interval containing the clamped argument.
    double slope(Bracket b) const noexcept { return (values_[b.index + 1] - values_[b.index]) / step_; }

    /// Re-grids onto [lo, hi] keeping the node count, sampling the current
    /// function (clamped outside its old domain).
    void resample(double lo, double hi);

private:
    double lo_ = 0.0;
    double hi_ = 1.0;
    double step_ = 1.0;
    std::vector<double> values_;
};

/// y = sum_k outer_k( sum_j inner_kj(x_j) ), with targets trained in [0,1]
/// through an affine output map.
class KaModel final : public Model {
public:
    KaModel(std::size_t dim, std::size_t addends, std::vector<PiecewiseLinear> inner, std::vector<PiecewiseLinear> outer,
            ColumnMap target_map);

    /// Random inner functions, outer functions as ramps; see train_ka.
    static KaModel initial(const KaParams& params, std::size_t dim, std::uint64_t seed);

    LearnerKind kind() const noexcept override { return LearnerKind::kolmogorov_arnold; }
    std::size_t dim() const noexcept override { return dim_; }
    std::size_t addends() const noexcept { return addends_; }
    void save(std::ostream& out) const override;
    static KaModel load_body(std::istream& in);

    /// Prediction in normalized target units (before the output map).
    double evaluate_normalized(std::span<const double> x) const;

    const PiecewiseLinear& inner(std::size_t k, std::size_t j) const { return inner_[k * dim_ + j]; }
    PiecewiseLinear& inner(std::size_t k, std::size_t j) { return inner_[k * dim_ + j]; }
    const PiecewiseLinear& outer(std::size_t k) const { return outer_[k]; }
    PiecewiseLinear& outer(std::size_t k) { return outer_[k]; }
    const ColumnMap& target_map() const noexcept { return target_map_; }
    void set_target_map(ColumnMap map) noexcept { target_map_ = map; }

    /// Inner sum of addend k at x (clamped inputs).
    double inner_sum(std::size_t k, std::span<const double> x) const;

    /// Number of trainable nodal values: inner then outer, row-major.
    std::size_t parameter_count() const noexcept;
    /// d(normalized output)/d(parameter p) at x, in the same ordering.
    std::vector<double> gradient(std::span<const double> x) const;
    /// Mutable access to parameter p in the same ordering.
    double& parameter(std::size_t p);

    /// One gradient step toward normalized target t: every nodal value moves
    /// by step * d(output)/d(value) with step = r * min(mu, 1/|g|^2), so the
    /// step never overshoots the projection onto this record. Returns the
    /// residual r before the step. Widens an outer domain first when x's inner sum lies
    /// more than 1% of its width outside.
    double update(std::span<const double> x, double target, double mu);

    /// Sets each outer domain to the range of its inner sums over `records`.
    void fit_outer_domains(const RecordSpan& records);

protected:
    double evaluate(std::span<const double> x) const override;

private:
    std::size_t dim_;
    std::size_t addends_;
    std::vector<PiecewiseLinear> inner_; // addends x dim, row-major
    std::vector<PiecewiseLinear> outer_;
    ColumnMap target_map_;
};

struct KaTrainReport {
    double initial_rmse = 0.0; // normalized units, before the first pass
    double final_rmse = 0.0;   // original units, after the last pass
};

/// Trains a model with `params.passes` sweeps of per-record updates over
/// `records` in the given order. Deterministic for a fixed seed and order.
/// Throws LearnerError if the iteration diverges.
KaModel train_ka(const KaParams& params, std::uint64_t seed, const RecordSpan& records, KaTrainReport* report = nullptr);

/// Single per-record step on a model that is already in normalized target
/// units. For the linearized model the residual is multiplied by
/// 1 - min(mu, 1/|g|^2) |g|^2, which lies in [0, 1) for mu > 0.
double ka_update_single(KaModel& model, std::span<const double> x, double target, double mu);

} // namespace ddr

#endif
