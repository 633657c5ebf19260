#pragma once

// Cartesian sweeps over config overrides. Even-indexed members form the
// calibration family; odd-indexed members are judged with constants fitted on
// the calibration family only.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freqlab/harness/config.hpp"
#include "freqlab/harness/scenario.hpp"

namespace freqlab::harness {

struct SweepAxis {
    std::string key;
    std::vector<std::string> values;
};

/// "key=v1,v2,..." ; throws ValidationError on a malformed spec.
SweepAxis parse_axis(const std::string& spec);

struct SweepMember {
    std::size_t index = 0;
    std::string role;
    Overrides overrides;
    ExperimentConfig config;
};

/// Expands the cartesian product (last axis fastest). Throws InsufficientFamily
/// for an empty axis list or an axis without values.
std::vector<SweepMember> expand_sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes);

struct SweepOptions {
    /// JSON-lines file receiving each record as soon as it is final.
    std::optional<std::filesystem::path> progress;
};

std::vector<ResultRecord> sweep(const ExperimentConfig& base, const std::vector<SweepAxis>& axes,
                                const SweepOptions& options = {});

}  // namespace freqlab::harness
