#pragma once

#include <string>

#include <json.hpp>

namespace freqlab::harness {

/// Serializes with sorted keys and every real printed with 17 significant
/// digits; non-finite reals become null. indent < 0 gives the compact form.
std::string dump_json(const nlohmann::json& value, int indent = -1);

}  // namespace freqlab::harness
