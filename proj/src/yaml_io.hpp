#pragma once

#include <yaml-cpp/yaml.h>

#include "phibvp/config.hpp"

namespace phibvp::detail {

ProblemConfig config_from_yaml(const YAML::Node& root);
void config_to_yaml(YAML::Emitter& e, const ProblemConfig& c);

} // namespace phibvp::detail
