#include "ddr/reference.hpp"

#include "ddr/rng.hpp"

#include <algorithm>

namespace ddr::reference {

std::vector<double> oracle_sample(std::span<const double> x, std::size_t n_mc, std::uint64_t seed, double amplitude)
{
    constexpr std::size_t block = 4096;
    if (n_mc == 0)
        throw std::invalid_argument("oracle sample size must be at least 1");
    std::vector<double> out;
    out.reserve(n_mc);
    double c[formula2_dim];
    for (std::size_t b = 0; out.size() < n_mc; ++b) {
        Rng rng(derive_seed(seed, b));
        for (std::size_t i = 0; i < block && out.size() < n_mc; ++i) {
            for (auto& v : c)
                v = rng.uniform();
            out.push_back(eval_formula2(x, c, amplitude));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<ModelPtr> fit_clusters(const Dataset& data, std::span<const std::size_t> order,
                                   std::span<const Cluster> clusters, const LearnerSpec& spec, std::size_t step)
{
    std::vector<ModelPtr> models;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        LearnerSpec local = spec;
        local.seed = model_seed(spec.seed, step, k);
        try {
            models.push_back(fit(local, RecordSpan(data, order.subspan(clusters[k].begin, clusters[k].size()))).model);
        } catch (const std::exception& e) {
            throw LearnerError("step " + std::to_string(step) + ", cluster " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return models;
}

std::vector<ModelPtr> fit_windows(const Dataset& data, std::span<const std::size_t> order,
                                  const SlidingWindowSpec& window, const LearnerSpec& spec)
{
    std::vector<ModelPtr> models;
    const std::size_t count = window.model_count(order.size());
    for (std::size_t k = 0; k < count; ++k) {
        LearnerSpec local = spec;
        local.seed = model_seed(spec.seed, sliding_seed_step, k);
        try {
            models.push_back(fit(local, RecordSpan(data, order.subspan(k * window.stride, window.length))).model);
        } catch (const std::exception& e) {
            throw LearnerError("sliding window " + std::to_string(k + 1) + ": " + e.what());
        }
    }
    return models;
}

void resort_within_clusters(const Dataset& data, std::span<std::size_t> order, std::span<const Cluster> clusters,
                            std::span<const ModelPtr> models)
{
    std::vector<double> res(order.size());
    for (std::size_t k = 0; k < clusters.size(); ++k)
        for (std::size_t p = clusters[k].begin; p < clusters[k].end; ++p)
            res[p] = data.output(order[p]) - models[k]->predict(data.input(order[p]));
    resort_by_residual(order, res, clusters);
}

std::vector<std::vector<double>> predict_samples(const Ensemble& ensemble, const Dataset& probes)
{
    std::vector<std::vector<double>> out;
    out.reserve(probes.size());
    for (std::size_t p = 0; p < probes.size(); ++p)
        out.push_back(ensemble.predict_sample(probes.input(p)));
    return out;
}

} // namespace ddr::reference
