#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mtsim/simulation.hpp"

namespace mtsim::cli {

enum class Scale { Desk, Paper };

/// Names accepted by `reproduce --figure`.
std::vector<std::string> preset_names();

/// Sweep configuration of a named figure preset. Throws ValidationError
/// listing the known presets for an unknown name.
SweepConfig preset(const std::string& name, Scale scale);

/// Exit codes: 0 success, 1 runtime failure, 2 invalid usage or input.
/// args excludes the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err);

}  // namespace mtsim::cli
