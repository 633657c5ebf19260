#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace freqlab::harness {

struct CheckInfo {
    std::string_view name;
    std::string_view summary;
};

/// Every check a scenario reports, in record order.
std::span<const CheckInfo> check_registry();

bool is_registered(std::string_view name);

/// Names expected in every record. The self-audit compares this static list
/// against the registry and throws ValidationError on any drift.
std::span<const std::string_view> required_checks();
void audit_registry();

}  // namespace freqlab::harness
