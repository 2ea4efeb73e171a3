#include "experiments.hpp"

#include "ddr/rng.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace ddr::cli {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::vector<double> column(const std::vector<MeanStd>& v, double MeanStd::*field)
{
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& m : v)
        out.push_back(m.*field);
    return out;
}

Correlations correlate(const std::vector<MeanStd>& oracle, const std::vector<MeanStd>& model)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const auto om = column(oracle, &MeanStd::mean), os = column(oracle, &MeanStd::stddev);
    const auto mm = column(model, &MeanStd::mean), ms = column(model, &MeanStd::stddev);
    return {try_pearson(mm, om).value_or(nan), try_pearson(ms, os).value_or(nan)};
}

MeanStd moments(std::span<const double> sample)
{
    if (sample.size() < 2)
        return {sample.empty() ? 0.0 : sample[0], 0.0};
    return sample_mean_std(sample);
}

} // namespace

std::vector<std::vector<double>> paper_probes()
{
    return {{0.5, 0.5, 0.5, 0.5, 0.5}, {0.65, 0.0, 0.5, 0.5, 0.5}, {0.68, 1.0, 0.5, 0.5, 0.5}, {0.74, 1.0, 0.5, 0.5, 1.0}};
}

BenchmarkConfig BenchmarkConfig::paper_scale()
{
    BenchmarkConfig c;
    c.records = 1000000;
    c.window = {30000, 5000};
    c.oracle_size = 100000;
    return c;
}

std::uint64_t data_seed(std::uint64_t master) { return derive_seed(master, 1); }
std::uint64_t learner_seed(std::uint64_t master) { return derive_seed(master, 2); }
std::uint64_t permutation_seed(std::uint64_t master) { return derive_seed(master, 3); }
std::uint64_t probe_seed(std::uint64_t master) { return derive_seed(master, 4); }
std::uint64_t oracle_seed(std::uint64_t master, std::size_t probe) { return derive_seed(master, 5, probe); }

std::optional<double> try_pearson(std::span<const double> u, std::span<const double> v)
{
    try {
        return pearson(u, v);
    } catch (const StatsError&) {
        return std::nullopt;
    }
}

Dataset random_probes(std::size_t count, std::size_t dim, std::uint64_t seed)
{
    Dataset probes(dim);
    Rng rng(seed);
    std::vector<double> x(dim);
    for (std::size_t p = 0; p < count; ++p) {
        for (auto& v : x)
            v = rng.uniform();
        probes.add(x, 0.0);
    }
    return probes;
}

BenchmarkEnsembles build_benchmark_ensembles(const BenchmarkConfig& config, const Dataset& data,
                                             const BuildOptions& options)
{
    LearnerSpec spec = config.learner;
    spec.seed = learner_seed(config.seed);
    BenchmarkEnsembles out;
    out.ddr = build_ensemble(data, config.schedule, spec, options);
    if (config.sliding)
        out.sliding = build_sliding_ensemble(data, out.ddr.order, config.window, spec, options.execution);
    const std::size_t w = config.random_clusters ? config.random_clusters : config.schedule.final_count();
    out.random = build_random_disjoint_ensemble(data, w, spec, permutation_seed(config.seed), options.execution);
    return out;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const BuildOptions& options)
{
    const auto t0 = clock_type::now();
    const Dataset data = generate_synthetic({config.noise, formula2_dim, data_seed(config.seed)}, config.records);
    config.schedule.validate_for(data.size());
    if (config.sliding)
        config.window.validate_for(data.size());

    BenchmarkReport report;
    BuildOptions opts = options;
    opts.on_step = [&](const StepReport& s) {
        report.steps.push_back(s);
        if (options.on_step)
            options.on_step(s);
    };
    const auto ensembles = build_benchmark_ensembles(config, data, opts);
    report.build_seconds = seconds_since(t0);
    report.ddr_models = ensembles.ddr.ensemble.size();
    report.random_models = ensembles.random.ensemble.size();
    report.sliding_models = ensembles.sliding.size();

    const Dataset probes = random_probes(config.points, formula2_dim, probe_seed(config.seed));
    const auto ddr_samples = predict_samples(ensembles.ddr.ensemble, probes, options.execution);
    const auto random_samples = predict_samples(ensembles.random.ensemble, probes, options.execution);
    std::vector<std::vector<double>> sliding_samples;
    if (config.sliding)
        sliding_samples = predict_samples(ensembles.sliding, probes, options.execution);

    std::vector<MeanStd> om, dm, rm, sm;
    std::size_t sliding_passes = 0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto x = probes.input(p);
        const auto oracle = oracle_sample(x, config.oracle_size, oracle_seed(config.seed, p), config.noise);
        ProbeResult r;
        r.x.assign(x.begin(), x.end());
        r.oracle = moments(oracle);
        r.ddr = moments(ddr_samples[p]);
        r.random = moments(random_samples[p]);
        r.ks_ddr = ks_two_sample(ddr_samples[p], oracle);
        r.ks_random = ks_two_sample(random_samples[p], oracle);
        if (config.sliding) {
            r.sliding = moments(sliding_samples[p]);
            r.ks_sliding = ks_two_sample(sliding_samples[p], oracle);
            sliding_passes += r.ks_sliding->pass;
            sm.push_back(*r.sliding);
        }
        report.ddr_passes += r.ks_ddr.pass;
        report.random_passes += r.ks_random.pass;
        om.push_back(r.oracle);
        dm.push_back(r.ddr);
        rm.push_back(r.random);
        report.probes.push_back(std::move(r));
    }

    report.ddr_corr = correlate(om, dm);
    report.random_corr = correlate(om, rm);
    if (config.sliding) {
        report.sliding_passes = sliding_passes;
        report.sliding_corr = correlate(om, sm);
    }
    report.oracle_mean_std = mean(column(om, &MeanStd::stddev));
    report.ddr_mean_std = mean(column(dm, &MeanStd::stddev));
    report.random_mean_std = mean(column(rm, &MeanStd::stddev));
    report.total_seconds = seconds_since(t0);
    return report;
}

// ---------------------------------------------------------------------------

WineReport run_wine(const Dataset& data, const WineConfig& config)
{
    const auto t0 = clock_type::now();
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0))
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    std::vector<std::size_t> perm = identity_order(data.size());
    Rng(config.split_seed).shuffle(std::span<std::size_t>(perm));
    const auto n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(data.size())));
    if (n_train < 2 || n_train >= data.size())
        throw DataError("dataset too small for a train/validation split");
    const std::vector<std::size_t> train_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::vector<std::size_t> valid_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());

    const Dataset train_raw = data.subset(train_rows);
    const NormalizationMaps maps = fit_normalization(train_raw);
    const Dataset train = apply_normalization(train_raw, maps);
    const Dataset valid = apply_normalization(data.subset(valid_rows), maps);

    LearnerSpec spec = config.learner;
    const auto ddr = build_ensemble(train, config.schedule, spec);
    const auto samples = predict_samples(ddr.ensemble, valid);

    std::vector<double> predicted, actual, spread;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        std::vector<double> y(samples[i].size());
        for (std::size_t k = 0; k < y.size(); ++k)
            y[k] = maps.denormalize_output(samples[i][k]);
        const auto m = moments(y);
        predicted.push_back(m.mean);
        spread.push_back(m.stddev);
        actual.push_back(data.output(valid_rows[i]));
    }
    WineReport r;
    r.train_records = train.size();
    r.validation_records = valid.size();
    r.validation_rmse = rmse(predicted, actual);
    r.mean_sample_std = mean(spread);
    r.seconds = seconds_since(t0);
    return r;
}

// ---------------------------------------------------------------------------

VarianceReport run_variance(const VarianceConfig& config, const BuildOptions& options)
{
    const auto t0 = clock_type::now();
    const Dataset data = generate_synthetic({config.noise, formula2_dim, data_seed(config.seed)}, config.records);
    config.schedule.validate_for(data.size());
    LearnerSpec spec = config.learner;
    spec.seed = learner_seed(config.seed);

    const auto ddr = build_ensemble(data, config.schedule, spec, options);
    const auto two_model = fit_expectation_variance(data, spec);
    const Dataset probes = random_probes(config.points, formula2_dim, probe_seed(config.seed));
    const auto samples = predict_samples(ddr.ensemble, probes, options.execution);

    VarianceReport report;
    std::vector<double> om, ov, dm, dv, tm, tv;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const auto x = probes.input(p);
        const auto oracle = oracle_sample(x, config.oracle_size, oracle_seed(config.seed, p), config.noise);
        const auto o = moments(oracle);
        const auto d = moments(samples[p]);
        const auto e = two_model.predict(x);
        VarianceRow row{{x.begin(), x.end()}, o.mean, o.stddev * o.stddev, d.mean, d.stddev * d.stddev,
                        e.mean, e.variance, e.clamped};
        report.clamped += row.clamped;
        om.push_back(row.oracle_mean);
        ov.push_back(row.oracle_variance);
        dm.push_back(row.ddr_mean);
        dv.push_back(row.ddr_variance);
        tm.push_back(row.two_model_mean);
        tv.push_back(row.two_model_variance);
        report.rows.push_back(std::move(row));
    }
    report.ddr_mean_corr = try_pearson(dm, om);
    report.ddr_variance_corr = try_pearson(dv, ov);
    report.two_model_mean_corr = try_pearson(tm, om);
    report.two_model_variance_corr = try_pearson(tv, ov);
    report.seconds = seconds_since(t0);
    return report;
}

} // namespace ddr::cli
