#ifndef DDR_LEARNER_HPP
#define DDR_LEARNER_HPP

#include "ddr/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddr {

class LearnerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LearnerKind { linear, kolmogorov_arnold };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct LinearParams {
    /// nullopt: plain least squares, ridge only as a fallback for a singular
    /// system. 0: never regularize (singular systems are an error). >0: always
    /// add this ridge term.
    std::optional<double> ridge;
};

struct KaParams {
    /// Number of outer functions; 0 selects 2m+1.
    std::size_t addends = 0;
    std::size_t inner_nodes = 5;
    std::size_t outer_nodes = 7;
    double mu = 0.002;
    std::size_t passes = 4;

    void validate() const;
};

struct LearnerSpec {
    LearnerKind kind = LearnerKind::kolmogorov_arnold;
    LinearParams linear;
    KaParams ka;
    std::uint64_t seed = 1;
};

/// Deterministic regression model. Immutable once trained; safe to share.
class Model {
public:
    virtual ~Model() = default;

    virtual LearnerKind kind() const noexcept = 0;
    virtual std::size_t dim() const noexcept = 0;

    /// Throws LearnerError if x.size() != dim().
    double predict(std::span<const double> x) const
    {
        check_dim(x.size());
        return evaluate(x);
    }

    /// Versioned text form; load_model() reads it back bit-exactly.
    virtual void save(std::ostream& out) const = 0;

protected:
    /// Prediction without the dimension check.
    virtual double evaluate(std::span<const double> x) const = 0;

    void check_dim(std::size_t n) const;
};

using ModelPtr = std::shared_ptr<const Model>;

struct FitResult {
    ModelPtr model;
    double train_rmse = 0.0;
};

/// Fits the learner described by `spec` on `records`, in the order given.
FitResult fit(const LearnerSpec& spec, const RecordSpan& records);

/// y_i - predict(x_i), in record order.
std::vector<double> residuals(const Model& model, const RecordSpan& records);

/// Writes residuals into `out` (size must match).
void residuals_into(const Model& model, const RecordSpan& records, std::span<double> out);

/// Reads one model written by Model::save.
ModelPtr load_model(std::istream& in);

// ---------------------------------------------------------------------------

/// y = intercept + w . x
class LinearModel final : public Model {
public:
    LinearModel(std::vector<double> weights, double intercept)
        : weights_(std::move(weights)), intercept_(intercept)
    {
    }

    LearnerKind kind() const noexcept override { return LearnerKind::linear; }
    std::size_t dim() const noexcept override { return weights_.size(); }
    void save(std::ostream& out) const override;

    const std::vector<double>& weights() const noexcept { return weights_; }
    double intercept() const noexcept { return intercept_; }

    static LinearModel load_body(std::istream& in);

protected:
    double evaluate(std::span<const double> x) const override;

private:
    std::vector<double> weights_;
    double intercept_;
};

/// Least squares on centered data; the intercept is never penalized.
LinearModel fit_linear(const LinearParams& params, const RecordSpan& records);

} // namespace ddr

#endif
