#ifndef DDR_ENSEMBLE_HPP
#define DDR_ENSEMBLE_HPP

#include "ddr/dataset.hpp"
#include "ddr/learner.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ddr {

class ScheduleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cluster counts per divisive step: strictly increasing, starting at 1.
class DivisionSchedule {
public:
    explicit DivisionSchedule(std::vector<std::size_t> counts);

    /// "1,2,3,5" (whitespace tolerated).
    static DivisionSchedule parse(std::string_view text);
    /// 1, 2, 4, ..., 2^(steps-1)
    static DivisionSchedule doubling(std::size_t steps);
    /// 1, 2, 3, 5, 7, 11, 17, 23, 29
    static DivisionSchedule paper_default();

    /// Throws ScheduleError unless every final cluster holds at least 2 of n records.
    void validate_for(std::size_t n) const;

    const std::vector<std::size_t>& counts() const noexcept { return counts_; }
    std::size_t steps() const noexcept { return counts_.size(); }
    std::size_t final_count() const noexcept { return counts_.back(); }
    std::string to_string() const;

private:
    std::vector<std::size_t> counts_;
};

/// Half-open range [begin, end) of positions in the working order.
struct Cluster {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    bool operator==(const Cluster&) const = default;
};

/// w consecutive clusters over n positions. Sizes differ by at most one; the
/// first n mod w clusters get the extra record. Throws ScheduleError if w > n/2.
std::vector<Cluster> split_consecutive(std::size_t n, std::size_t w);

/// Stable ascending sort of each cluster's positions by residual. `residual`
/// is indexed by position, like `order`. Records never leave their cluster.
void resort_by_residual(std::span<std::size_t> order, std::span<const double> residual,
                        std::span<const Cluster> clusters);

/// Computes per-position residuals against each cluster's model, then resorts.
void resort_within_clusters(const Dataset& data, std::span<std::size_t> order, std::span<const Cluster> clusters,
                            std::span<const ModelPtr> models);

struct SlidingWindowSpec {
    std::size_t length = 30000; // r
    std::size_t stride = 5000;  // d

    void validate_for(std::size_t n) const;
    /// floor((n - r)/d) + 1
    std::size_t model_count(std::size_t n) const;
};

enum class Execution { serial, parallel };

struct StepReport {
    std::size_t step = 0;     // 1-based
    std::size_t clusters = 0; // w_j
    double mean_abs_residual = 0.0;
};

/// Ordered set of trained models answering with one output per model.
class Ensemble {
public:
    Ensemble() = default;
    Ensemble(std::vector<ModelPtr> models, std::size_t dim);

    std::size_t size() const noexcept { return models_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<ModelPtr>& models() const noexcept { return models_; }

    /// All model outputs at x, sorted ascending.
    std::vector<double> predict_sample(std::span<const double> x) const;

private:
    std::vector<ModelPtr> models_;
    std::size_t dim_ = 0;
};

/// Row p holds ensemble.predict_sample(probes.input(p)). Parallel over probes.
std::vector<std::vector<double>> predict_samples(const Ensemble& ensemble, const Dataset& probes,
                                                 Execution execution = Execution::parallel);

struct BuildOptions {
    Execution execution = Execution::parallel;
    /// Called after every divisive step.
    std::function<void(const StepReport&)> on_step;
};

struct DdrResult {
    Ensemble ensemble;
    std::vector<std::size_t> order; // final working order of dataset rows
    std::vector<StepReport> steps;
};

/// Per-model learner seed derived from the master seed.
std::uint64_t model_seed(std::uint64_t master, std::size_t step, std::size_t cluster);

/// Step index used in model_seed for sliding-window models.
inline constexpr std::size_t sliding_seed_step = 0x51d1'0000;

/// Fits one model per cluster of `order` (step index feeds the seeds).
/// Learner errors are rethrown annotated with step and cluster.
std::vector<ModelPtr> fit_clusters(const Dataset& data, std::span<const std::size_t> order,
                                   std::span<const Cluster> clusters, const LearnerSpec& spec, std::size_t step,
                                   Execution execution = Execution::parallel);

/// The divisive data resorting procedure. Starts from the dataset's storage
/// order; for each w_j: split into w_j consecutive clusters, fit a model per
/// cluster, resort each cluster by residual against its own model.
DdrResult build_ensemble(const Dataset& data, const DivisionSchedule& schedule, const LearnerSpec& spec,
                         const BuildOptions& options = {});

/// Models on overlapping windows of `order`: model k covers positions
/// [k d, k d + r). Every model trains from scratch.
Ensemble build_sliding_ensemble(const Dataset& data, std::span<const std::size_t> order,
                                const SlidingWindowSpec& window, const LearnerSpec& spec,
                                Execution execution = Execution::parallel);

/// Baseline: seeded random permutation split into w clusters, no resorting.
DdrResult build_random_disjoint_ensemble(const Dataset& data, std::size_t w, const LearnerSpec& spec,
                                         std::uint64_t seed, Execution execution = Execution::parallel);

/// Expectation model plus a model of squared residuals.
class ExpectationVarianceModel {
public:
    struct Estimate {
        double mean;
        double variance; // clamped at 0
        bool clamped;    // the raw variance prediction was negative
    };

    ExpectationVarianceModel(ModelPtr expectation, ModelPtr variance)
        : expectation_(std::move(expectation)), variance_(std::move(variance))
    {
    }

    Estimate predict(std::span<const double> x) const;
    double predict_mean(std::span<const double> x) const { return expectation_->predict(x); }
    double predict_variance(std::span<const double> x) const { return predict(x).variance; }

    const Model& expectation() const noexcept { return *expectation_; }
    const Model& variance() const noexcept { return *variance_; }

private:
    ModelPtr expectation_;
    ModelPtr variance_;
};

ExpectationVarianceModel fit_expectation_variance(const Dataset& data, const LearnerSpec& spec);

// ---------------------------------------------------------------------------
// persistence

/// Everything needed to reload an ensemble for inference.
struct EnsembleManifest {
    LearnerSpec learner;
    std::string method = "ddr"; // "ddr" or "random"
    std::vector<std::size_t> schedule;
    std::uint64_t seed = 0; // master seed (learner and, for the baseline, the permutation)
    std::size_t records = 0;
    std::uint64_t dataset_fingerprint = 0;
    NormalizationMaps normalization;
    bool has_sliding = false;
    SlidingWindowSpec sliding;
};

struct StoredEnsemble {
    EnsembleManifest manifest;
    Ensemble main;
    Ensemble sliding; // empty unless manifest.has_sliding
};

/// Writes manifest.json, models.txt and (if present) sliding.txt into dir.
void save_ensemble(const std::filesystem::path& dir, const StoredEnsemble& stored);
StoredEnsemble load_ensemble(const std::filesystem::path& dir);

void save_models(std::ostream& out, const Ensemble& ensemble);
Ensemble load_models(std::istream& in);

} // namespace ddr

#endif
