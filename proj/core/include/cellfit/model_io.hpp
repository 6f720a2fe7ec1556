#pragma once
#include <string>

#include "cellfit/model.hpp"

namespace cellfit {

// JSON round-trip for trained models. Doubles are written via shortest
// round-trip formatting, so save -> load -> predict is bit-exact. Bounds use
// the string sentinels "inf"/"-inf" for unbounded interval ends. Documents
// carry format_version = 1; anything else is rejected on load.

std::string model_to_json(const PartitionModel& model);
PartitionModel model_from_json(const std::string& text);

void save_model(const PartitionModel& model, const std::string& path);
PartitionModel load_model(const std::string& path);

} // namespace cellfit
