#pragma once

#include <json.hpp>

#include "sleigh/analysis.hpp"
#include "sleigh/integrator.hpp"

namespace sleigh {

void to_json(nlohmann::ordered_json& j, const Witness& w);
void to_json(nlohmann::ordered_json& j, const VerificationReport& r);
void to_json(nlohmann::ordered_json& j, const ConvergenceSummary& s);
void to_json(nlohmann::ordered_json& j, const IntegratorStats& s);

}  // namespace sleigh
