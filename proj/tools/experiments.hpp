#ifndef DDR_TOOLS_EXPERIMENTS_HPP
#define DDR_TOOLS_EXPERIMENTS_HPP

#include "ddr/ensemble.hpp"
#include "ddr/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ddr::cli {

/// The four probe inputs of the synthetic benchmark.
std::vector<std::vector<double>> paper_probes();

/// Synthetic distribution-recovery benchmark: DDR, sliding-window and
/// random-disjoint ensembles against Monte-Carlo oracles at random probes.
struct BenchmarkConfig {
    std::size_t records = 200000;
    DivisionSchedule schedule = DivisionSchedule::paper_default();
    LearnerSpec learner;
    bool sliding = true;
    SlidingWindowSpec window{6000, 1000};
    std::size_t random_clusters = 0; // 0: same as the final DDR count
    std::size_t points = 100;
    std::size_t oracle_size = 20000;
    double noise = 0.4;
    std::uint64_t seed = 1;

    /// N = 1e6, r = 30000, d = 5000, 1e5-point oracles.
    static BenchmarkConfig paper_scale();
};

struct ProbeResult {
    std::vector<double> x;
    MeanStd oracle;
    MeanStd ddr;
    MeanStd random;
    std::optional<MeanStd> sliding;
    KsResult ks_ddr;
    KsResult ks_random;
    std::optional<KsResult> ks_sliding;
};

struct Correlations {
    double mean = 0.0;
    double stddev = 0.0; // NaN when a std vector is constant
};

struct BenchmarkReport {
    std::vector<StepReport> steps;
    std::size_t ddr_models = 0;
    std::size_t random_models = 0;
    std::size_t sliding_models = 0;
    std::vector<ProbeResult> probes;

    std::size_t ddr_passes = 0;
    std::size_t random_passes = 0;
    std::optional<std::size_t> sliding_passes;
    Correlations ddr_corr, random_corr;
    std::optional<Correlations> sliding_corr;
    double oracle_mean_std = 0.0;
    double ddr_mean_std = 0.0;
    double random_mean_std = 0.0;
    double build_seconds = 0.0;
    double total_seconds = 0.0;
};

struct BenchmarkEnsembles {
    DdrResult ddr;
    DdrResult random;
    Ensemble sliding;
};

BenchmarkEnsembles build_benchmark_ensembles(const BenchmarkConfig& config, const Dataset& data,
                                             const BuildOptions& options = {});
BenchmarkReport run_benchmark(const BenchmarkConfig& config, const BuildOptions& options = {});

/// Data, learner, baseline, probe and oracle seeds all derive from the master seed.
std::uint64_t data_seed(std::uint64_t master);
std::uint64_t learner_seed(std::uint64_t master);
std::uint64_t permutation_seed(std::uint64_t master);
std::uint64_t probe_seed(std::uint64_t master);
std::uint64_t oracle_seed(std::uint64_t master, std::size_t probe);

Dataset random_probes(std::size_t count, std::size_t dim, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Wine-quality style regression: seeded 85/15 split, normalization fitted on
/// the training part, DDR ensemble, metrics in original output units.
struct WineConfig {
    DivisionSchedule schedule = DivisionSchedule::paper_default();
    LearnerSpec learner;
    double train_fraction = 0.85;
    std::uint64_t split_seed = 1;
};

struct WineReport {
    std::size_t train_records = 0;
    std::size_t validation_records = 0;
    double validation_rmse = 0.0;
    double mean_sample_std = 0.0;
    double seconds = 0.0;
};

WineReport run_wine(const Dataset& data, const WineConfig& config);

// ---------------------------------------------------------------------------

/// Variance accuracy on synthetic data: DDR-ensemble moments and the
/// expectation/variance two-model method against Monte-Carlo moments.
struct VarianceConfig {
    std::size_t records = 100000;
    DivisionSchedule schedule = DivisionSchedule::paper_default();
    LearnerSpec learner;
    std::size_t points = 100;
    std::size_t oracle_size = 20000;
    double noise = 0.4;
    std::uint64_t seed = 1;
};

struct VarianceRow {
    std::vector<double> x;
    double oracle_mean = 0.0, oracle_variance = 0.0;
    double ddr_mean = 0.0, ddr_variance = 0.0;
    double two_model_mean = 0.0, two_model_variance = 0.0;
    bool clamped = false;
};

struct VarianceReport {
    std::vector<VarianceRow> rows;
    /// nullopt when the oracle vector is constant (for example noise-free data).
    std::optional<double> ddr_mean_corr, ddr_variance_corr;
    std::optional<double> two_model_mean_corr, two_model_variance_corr;
    std::size_t clamped = 0;
    double seconds = 0.0;
};

VarianceReport run_variance(const VarianceConfig& config, const BuildOptions& options = {});

/// Pearson correlation, or nullopt if either vector is constant.
std::optional<double> try_pearson(std::span<const double> u, std::span<const double> v);

} // namespace ddr::cli

#endif
