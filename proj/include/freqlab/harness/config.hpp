#pragma once

// Experiment configuration: YAML in, validated struct out, canonical JSON for
// digests and round trips. JSON is a YAML subset, so the canonical form loads
// back through the same parser.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "freqlab/mesh.hpp"
#include "freqlab/solver.hpp"

namespace freqlab::harness {

struct DomainSpec {
    DomainKind kind = DomainKind::Interval;
    std::vector<AxisBounds> bounds{{0.0, 1.0}};
};

struct GridSpec {
    std::vector<std::size_t> points{129};
    /// Number of extra levels, each halving h and dt.
    std::size_t refinements = 1;
};

struct TimeSpec {
    double T = 0.05;
    std::size_t steps = 400;
};

struct CoefficientSpec {
    CoefficientField::Kind kind = CoefficientField::Kind::Zero;
    std::vector<double> b{0.0};
    double c = 0.0;
    std::uint64_t seed = 1;
    double amplitude = 0.0;
    int modes = 4;
};

enum class InitialKind { Eigenfunction, SineSeries, Bump, FourierRandom, Zero };

struct InitialSpec {
    InitialKind kind = InitialKind::Eigenfunction;
    int mode = 1;
    int transverse_mode = 1;
    std::vector<double> coefficients{1.0};
    std::vector<double> center{0.5};
    double width = 0.25;
    std::uint64_t seed = 1;
    int modes = 6;
    double scale = 1.0;
};

struct BallSpec {
    std::vector<double> center{0.5};
    double radius = 0.05;
};

enum class LambdaPolicy { Fixed, LambdaStar };

struct WeightSpec {
    LambdaPolicy policy = LambdaPolicy::Fixed;
    double lambda = 0.01;
};

/// Generic constants. Unset entries are fitted by the calibration protocol.
struct RateSpec {
    double c0 = 1.0;
    std::optional<double> kt;
    std::optional<double> theorem_1_1;
    std::optional<double> theorem_1_3;
    std::optional<double> zeta;
    std::optional<double> assumption3;
};

struct ToleranceSpec {
    double caloric = 1e-12;
    /// dH residual bound; unset means 1e-2 for pure heat and 5e-2 otherwise.
    std::optional<double> dH;
    double theta_sign = 1e-8;
    double theta_reduced = 1e-10;
    double monotonicity = 1e-3;
    double stability_factor = 2.0;
    double energy = 1e-2;
    double zeta = 1e-6;
    double backward = 1e-6;
    double hardy = 1e-12;
    double backsubstitution = 1e-10;
    double theorem_slack = 10.0;
    double refinement_spread = 10.0;
    double assumption3_pure = 1e-3;
    std::size_t multiplier_samples = 20;
};

struct OutputSpec {
    std::string dir = "results";
    std::string format = "csv";
    std::size_t trace_points = 65;
};

struct ExperimentConfig {
    std::string name = "scenario";
    DomainSpec domain;
    GridSpec grid;
    TimeSpec time;
    CoefficientSpec coefficients;
    InitialSpec initial;
    BallSpec ball;
    WeightSpec weight;
    RateSpec rates;
    ToleranceSpec tolerances;
    OutputSpec output;

    Domain make_domain() const;
    Point ball_center() const;
    InitialData initial_data(const Domain& domain) const;
};

/// key=value pairs applied to the parsed document before validation. Keys are
/// dotted paths (grid.points, coefficients.amplitude, ...); values are YAML scalars
/// or flow sequences.
using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Throws ParseError (syntax, with line) or ValidationError (schema or invariant).
ExperimentConfig parse_config(std::string_view text, const Overrides& overrides = {});
/// As parse_config; IoError when the file cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

ExperimentConfig with_overrides(const ExperimentConfig& config, const Overrides& overrides);

nlohmann::json to_json(const ExperimentConfig& config);
/// Sorted keys, no whitespace, reals with 17 significant digits.
std::string canonical_json(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical form, as 16 hex digits.
std::string config_digest(const ExperimentConfig& config);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace freqlab::harness
