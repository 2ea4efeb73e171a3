#include "ddr/ensemble.hpp"

#include "ddr/reference.hpp"
#include "ddr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <numeric>
#include <sstream>
#include <utility>

namespace ddr {

namespace {
constexpr std::size_t variance_seed_tag = 0x7a71'0000;

std::string provenance(std::size_t step, std::size_t cluster, const std::string& what)
{
    return "step " + std::to_string(step) + ", cluster " + std::to_string(cluster + 1) + ": " + what;
}

/// Rethrows the first captured exception (lowest index), if any.
void rethrow_first(const std::vector<std::exception_ptr>& errors)
{
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

double mean_abs(std::span<const double> v)
{
    double acc = 0.0;
    for (double x : v)
        acc += std::abs(x);
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

} // namespace

// ---------------------------------------------------------------------------

DivisionSchedule::DivisionSchedule(std::vector<std::size_t> counts) : counts_(std::move(counts))
{
    if (counts_.empty())
        throw ScheduleError("division schedule is empty");
    if (counts_.front() != 1)
        throw ScheduleError("division schedule must start with 1");
    for (std::size_t i = 1; i < counts_.size(); ++i)
        if (counts_[i] <= counts_[i - 1])
            throw ScheduleError("division schedule must be strictly increasing");
}

DivisionSchedule DivisionSchedule::parse(std::string_view text)
{
    std::vector<std::size_t> counts;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw ScheduleError("empty entry in division schedule '" + std::string(text) + "'");
        item = item.substr(b, e - b + 1);
        if (!std::all_of(item.begin(), item.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw ScheduleError("bad entry '" + item + "' in division schedule");
        counts.push_back(std::stoull(item));
    }
    return DivisionSchedule(std::move(counts));
}

DivisionSchedule DivisionSchedule::doubling(std::size_t steps)
{
    if (steps == 0)
        throw ScheduleError("doubling schedule needs at least one step");
    std::vector<std::size_t> counts(steps);
    for (std::size_t i = 0; i < steps; ++i)
        counts[i] = std::size_t{1} << i;
    return DivisionSchedule(std::move(counts));
}

DivisionSchedule DivisionSchedule::paper_default() { return DivisionSchedule({1, 2, 3, 5, 7, 11, 17, 23, 29}); }

void DivisionSchedule::validate_for(std::size_t n) const
{
    if (n == 0)
        throw ScheduleError("dataset is empty");
    if (final_count() > 1 && final_count() > n / 2)
        throw ScheduleError("schedule ends with " + std::to_string(final_count()) + " clusters but " +
                            std::to_string(n) + " records allow at most " + std::to_string(n / 2));
}

std::string DivisionSchedule::to_string() const
{
    std::string s;
    for (std::size_t i = 0; i < counts_.size(); ++i)
        s += (i ? "," : "") + std::to_string(counts_[i]);
    return s;
}

std::vector<Cluster> split_consecutive(std::size_t n, std::size_t w)
{
    if (w == 0)
        throw ScheduleError("cluster count must be positive");
    if (w > 1 && w > n / 2)
        throw ScheduleError("cannot split " + std::to_string(n) + " records into " + std::to_string(w) +
                            " clusters of at least 2");
    std::vector<Cluster> clusters(w);
    const std::size_t base = n / w;
    const std::size_t extra = n % w;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < w; ++k) {
        const std::size_t len = base + (k < extra ? 1 : 0);
        clusters[k] = {pos, pos + len};
        pos += len;
    }
    return clusters;
}

void resort_by_residual(std::span<std::size_t> order, std::span<const double> residual,
                        std::span<const Cluster> clusters)
{
    std::vector<std::pair<double, std::size_t>> buf;
    for (const auto& c : clusters) {
        buf.resize(c.size());
        for (std::size_t p = c.begin; p < c.end; ++p)
            buf[p - c.begin] = {residual[p], order[p]};
        std::stable_sort(buf.begin(), buf.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t p = c.begin; p < c.end; ++p)
            order[p] = buf[p - c.begin].second;
    }
}

namespace {

/// Residual of every position against its cluster's model.
std::vector<double> cluster_residuals(const Dataset& data, std::span<const std::size_t> order,
                                      std::span<const Cluster> clusters, std::span<const ModelPtr> models)
{
    std::vector<double> res(order.size());
    const auto count = static_cast<std::int64_t>(clusters.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < count; ++k) {
        const auto& c = clusters[static_cast<std::size_t>(k)];
        const Model& model = *models[static_cast<std::size_t>(k)];
        for (std::size_t p = c.begin; p < c.end; ++p)
            res[p] = data.output(order[p]) - model.predict(data.input(order[p]));
    }
    return res;
}

} // namespace

void resort_within_clusters(const Dataset& data, std::span<std::size_t> order, std::span<const Cluster> clusters,
                            std::span<const ModelPtr> models)
{
    if (models.size() != clusters.size())
        throw std::invalid_argument("one model per cluster is required for resorting");
    const auto res = cluster_residuals(data, order, clusters, models);
    const auto count = static_cast<std::int64_t>(clusters.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < count; ++k)
        resort_by_residual(order, res, clusters.subspan(static_cast<std::size_t>(k), 1));
}

// ---------------------------------------------------------------------------

void SlidingWindowSpec::validate_for(std::size_t n) const
{
    if (stride == 0)
        throw ScheduleError("sliding-window stride must be at least 1");
    if (length == 0 || length > n)
        throw ScheduleError("sliding-window length " + std::to_string(length) + " must lie in [1, " +
                            std::to_string(n) + "]");
    if (stride > length)
        throw ScheduleError("sliding-window stride must not exceed the window length");
}

std::size_t SlidingWindowSpec::model_count(std::size_t n) const
{
    validate_for(n);
    return (n - length) / stride + 1;
}

Ensemble::Ensemble(std::vector<ModelPtr> models, std::size_t dim) : models_(std::move(models)), dim_(dim)
{
    for (const auto& m : models_)
        if (!m || m->dim() != dim_)
            throw std::invalid_argument("ensemble models must all share the input dimension");
}

std::vector<double> Ensemble::predict_sample(std::span<const double> x) const
{
    if (x.size() != dim_)
        throw LearnerError("input has " + std::to_string(x.size()) + " components, ensemble expects " +
                           std::to_string(dim_));
    std::vector<double> out;
    out.reserve(models_.size());
    for (const auto& m : models_)
        out.push_back(m->predict(x));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<double>> predict_samples(const Ensemble& ensemble, const Dataset& probes, Execution execution)
{
    if (execution == Execution::serial)
        return reference::predict_samples(ensemble, probes);
    std::vector<std::vector<double>> out(probes.size());
    std::vector<std::exception_ptr> errors(probes.size());
    const auto count = static_cast<std::int64_t>(probes.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t p = 0; p < count; ++p) {
        try {
            out[static_cast<std::size_t>(p)] = ensemble.predict_sample(probes.input(static_cast<std::size_t>(p)));
        } catch (...) {
            errors[static_cast<std::size_t>(p)] = std::current_exception();
        }
    }
    rethrow_first(errors);
    return out;
}

// ---------------------------------------------------------------------------

std::uint64_t model_seed(std::uint64_t master, std::size_t step, std::size_t cluster)
{
    return derive_seed(master, step, cluster);
}

std::vector<ModelPtr> fit_clusters(const Dataset& data, std::span<const std::size_t> order,
                                   std::span<const Cluster> clusters, const LearnerSpec& spec, std::size_t step,
                                   Execution execution)
{
    if (execution == Execution::serial)
        return reference::fit_clusters(data, order, clusters, spec, step);

    std::vector<ModelPtr> models(clusters.size());
    std::vector<std::exception_ptr> errors(clusters.size());
    const auto count = static_cast<std::int64_t>(clusters.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t kk = 0; kk < count; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        const auto& c = clusters[k];
        try {
            LearnerSpec local = spec;
            local.seed = model_seed(spec.seed, step, k);
            models[k] = fit(local, RecordSpan(data, order.subspan(c.begin, c.size()))).model;
        } catch (const std::exception& e) {
            errors[k] = std::make_exception_ptr(LearnerError(provenance(step, k, e.what())));
        }
    }
    rethrow_first(errors);
    return models;
}

DdrResult build_ensemble(const Dataset& data, const DivisionSchedule& schedule, const LearnerSpec& spec,
                         const BuildOptions& options)
{
    schedule.validate_for(data.size());
    const bool serial = options.execution == Execution::serial;

    DdrResult result;
    result.order = identity_order(data.size());
    std::vector<ModelPtr> models;

    for (std::size_t j = 0; j < schedule.steps(); ++j) {
        const std::size_t step = j + 1;
        const auto clusters = split_consecutive(data.size(), schedule.counts()[j]);
        models = fit_clusters(data, result.order, clusters, spec, step, options.execution);

        std::vector<double> res;
        if (serial) {
            res.resize(data.size());
            for (std::size_t k = 0; k < clusters.size(); ++k) {
                const auto& c = clusters[k];
                residuals_into(*models[k], RecordSpan(data, std::span(result.order).subspan(c.begin, c.size())),
                               std::span(res).subspan(c.begin, c.size()));
            }
            resort_by_residual(result.order, res, clusters);
        } else {
            res = cluster_residuals(data, result.order, clusters, models);
            const auto count = static_cast<std::int64_t>(clusters.size());
#pragma omp parallel for schedule(dynamic, 1)
            for (std::int64_t k = 0; k < count; ++k)
                resort_by_residual(result.order, res, std::span(clusters).subspan(static_cast<std::size_t>(k), 1));
        }

        StepReport report{step, clusters.size(), mean_abs(res)};
        result.steps.push_back(report);
        if (options.on_step)
            options.on_step(report);
    }

    result.ensemble = Ensemble(std::move(models), data.dim());
    return result;
}

Ensemble build_sliding_ensemble(const Dataset& data, std::span<const std::size_t> order,
                                const SlidingWindowSpec& window, const LearnerSpec& spec, Execution execution)
{
    if (order.size() != data.size())
        throw std::invalid_argument("working order does not cover the dataset");
    const std::size_t count = window.model_count(order.size());
    if (execution == Execution::serial)
        return Ensemble(reference::fit_windows(data, order, window, spec), data.dim());

    std::vector<ModelPtr> models(count);
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t kk = 0; kk < static_cast<std::int64_t>(count); ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        try {
            LearnerSpec local = spec;
            local.seed = model_seed(spec.seed, sliding_seed_step, k);
            models[k] = fit(local, RecordSpan(data, order.subspan(k * window.stride, window.length))).model;
        } catch (const std::exception& e) {
            errors[k] = std::make_exception_ptr(LearnerError("sliding window " + std::to_string(k + 1) + ": " + e.what()));
        }
    }
    rethrow_first(errors);
    return Ensemble(std::move(models), data.dim());
}

DdrResult build_random_disjoint_ensemble(const Dataset& data, std::size_t w, const LearnerSpec& spec,
                                         std::uint64_t seed, Execution execution)
{
    const auto clusters = split_consecutive(data.size(), w);
    DdrResult result;
    result.order = identity_order(data.size());
    Rng rng(seed);
    rng.shuffle(std::span(result.order));
    auto models = fit_clusters(data, result.order, clusters, spec, 1, execution);
    result.ensemble = Ensemble(std::move(models), data.dim());
    return result;
}

// ---------------------------------------------------------------------------

ExpectationVarianceModel::Estimate ExpectationVarianceModel::predict(std::span<const double> x) const
{
    const double mean = expectation_->predict(x);
    const double raw = variance_->predict(x);
    return {mean, std::max(0.0, raw), raw < 0.0};
}

ExpectationVarianceModel fit_expectation_variance(const Dataset& data, const LearnerSpec& spec)
{
    if (data.empty())
        throw LearnerError("cannot fit expectation/variance models on an empty dataset");
    const auto order = identity_order(data.size());
    const RecordSpan all(data, order);

    LearnerSpec e_spec = spec;
    e_spec.seed = model_seed(spec.seed, variance_seed_tag, 0);
    auto expectation = fit(e_spec, all).model;

    std::vector<double> v(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data.output(i) - expectation->predict(data.input(i));
        v[i] = r * r;
    }
    const Dataset squared = data.with_outputs(std::move(v));
    LearnerSpec v_spec = spec;
    v_spec.seed = model_seed(spec.seed, variance_seed_tag, 1);
    auto variance = fit(v_spec, RecordSpan(squared, order)).model;
    return {std::move(expectation), std::move(variance)};
}

} // namespace ddr
