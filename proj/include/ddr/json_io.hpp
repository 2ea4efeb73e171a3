#ifndef DDR_JSON_IO_HPP
#define DDR_JSON_IO_HPP

#include "ddr/dataset.hpp"
#include "ddr/ensemble.hpp"
#include "ddr/learner.hpp"

#include <json.hpp>

namespace ddr {

void to_json(nlohmann::json& j, const LearnerSpec& spec);
void from_json(const nlohmann::json& j, LearnerSpec& spec);

void to_json(nlohmann::json& j, const NormalizationMaps& maps);
void from_json(const nlohmann::json& j, NormalizationMaps& maps);

void to_json(nlohmann::json& j, const EnsembleManifest& manifest);
void from_json(const nlohmann::json& j, EnsembleManifest& manifest);

} // namespace ddr

#endif
