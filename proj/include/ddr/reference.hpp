#ifndef DDR_REFERENCE_HPP
#define DDR_REFERENCE_HPP

// Single-threaded reference versions of the OpenMP kernels. They define the
// expected results: the parallel kernels must match them bit for bit.

#include "ddr/dataset.hpp"
#include "ddr/ensemble.hpp"
#include "ddr/learner.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ddr::reference {

std::vector<double> oracle_sample(std::span<const double> x, std::size_t n_mc, std::uint64_t seed,
                                  double amplitude = 0.4);

std::vector<ModelPtr> fit_clusters(const Dataset& data, std::span<const std::size_t> order,
                                   std::span<const Cluster> clusters, const LearnerSpec& spec, std::size_t step);

std::vector<ModelPtr> fit_windows(const Dataset& data, std::span<const std::size_t> order,
                                  const SlidingWindowSpec& window, const LearnerSpec& spec);

void resort_within_clusters(const Dataset& data, std::span<std::size_t> order, std::span<const Cluster> clusters,
                            std::span<const ModelPtr> models);

/// Row p holds ensemble.predict_sample(probes[p]).
std::vector<std::vector<double>> predict_samples(const Ensemble& ensemble, const Dataset& probes);

} // namespace ddr::reference

#endif
