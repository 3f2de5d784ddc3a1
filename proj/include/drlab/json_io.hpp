#pragma once

#include <string>

#include <json.hpp>

#include "drlab/channels.hpp"
#include "drlab/states.hpp"
#include "drlab/tomography.hpp"

namespace drlab {

using json = nlohmann::ordered_json;

json matrix_to_json(const CMat& m);
CMat matrix_from_json(const json& j);

json state_to_json(const MultimodeState& s);
MultimodeState state_from_json(const json& j);  // validates

json channel_to_json(const EmissionChannel& ch);
EmissionChannel channel_from_json(const json& j);

json calibration_to_json(const CalibrationReport& r);
json noise_to_json(const NoiseParams& p);
NoiseParams noise_from_json(const json& j);

json moments_to_json(const MomentTable& t);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

}  // namespace drlab
