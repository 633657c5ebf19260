#pragma once

// One scenario: solve at every refinement level, measure everything the
// checks need (metrics), then evaluate the checks against a calibration. The
// two phases are separate so a sweep can fit constants on its calibration
// members before judging the hold-out members.

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "freqlab/harness/config.hpp"
#include "freqlab/uc_bounds.hpp"

namespace freqlab::harness {

enum class Status { Pass, Fail, NotApplicable };

std::string_view to_string(Status status);
Status status_from_string(std::string_view text);

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CheckOutcome {
    std::string name;
    Status status = Status::NotApplicable;
    double margin = kNaN;
    double fitted_constant = kNaN;
    std::string detail;
};

/// Everything measured on one refinement level.
struct LevelMetrics {
    std::string grid;
    std::size_t steps = 0;
    double dt = 0.0;
    double lambda = 0.0;

    bool frequency_ok = false;  ///< false when H underflows somewhere
    double dH_residual = kNaN;
    double theta_min = kNaN;          ///< min theta / boundary scale
    double theta_reduced_gap = kNaN;  ///< max |theta - reduced| / boundary scale
    MonotonicityFit monotonicity;
    double N_T = kNaN;

    bool norms_ok = false;  ///< false when an H^-1 norm vanishes
    double energy_residual = kNaN;
    double zeta_growth = kNaN;
    double zeta0 = kNaN;
    double hm1_0 = kNaN;
    double hm1_T = kNaN;

    double growth_rate = kNaN;
    double assumption3 = kNaN;  ///< max rho (M > 0) or max |f|_{H^-1}/|u|_2 (M = 0)
    double slack_margin = kNaN;
    bool dirichlet_ok = false;
    std::string dirichlet_detail;

    ObservedMasses masses;
    UCReport theorem_1_1;
    UCReport theorem_1_3;
    bool theorem_1_3_ok = false;

    double multiplier_ratio = kNaN;
    double multiplier_reference = kNaN;
};

struct ScenarioMetrics {
    ExperimentConfig config;
    std::string digest;
    std::size_t dim = 1;
    double M = 0.0;
    double T = 0.0;
    double m = 0.0;
    double r = 0.0;
    std::vector<LevelMetrics> levels;  ///< coarse to fine

    double caloric_residual = kNaN;
    double hardy_margin = kNaN;  ///< min (rhs - lhs) / rhs over the lambda sweep
    bool hardy_trivial = false;
    /// Finest-level terminal field, kept for the ball estimate.
    Grid finest_grid;
    Field terminal;
    double scale_gap = kNaN;  ///< max relative change of N, theta/H, fitted C under u -> -8u
    std::string scale_detail;

    nlohmann::json traces;
    std::string error;  ///< non-empty when the scenario itself could not be computed
    int error_exit = 0;
    double wall_time = 0.0;

    const LevelMetrics& finest() const { return levels.back(); }
};

/// Constants fitted on a calibration family (or taken from config overrides).
struct Calibration {
    std::string source = "self";
    double kt_rate = 0.0;
    double theorem_1_1_C = kNaN;
    double theorem_1_3_C = kNaN;
    double c_exp = 0.0;
    double c_lin = 0.0;
    std::vector<std::size_t> members;
};

struct ResultRecord {
    std::size_t scenario_id = 0;
    std::string name;
    std::string role = "standalone";  ///< standalone | calibration | hold-out
    std::string config_digest;
    nlohmann::json config;
    std::string grid;
    double dt = kNaN;
    double M = kNaN;
    double T = kNaN;
    double lambda = kNaN;
    double gamma = kNaN;
    std::vector<CheckOutcome> checks;
    nlohmann::json constants;
    nlohmann::json traces;
    std::string error;
    int error_exit = 0;  ///< exit code implied by error (not serialized)
    double wall_time = 0.0;

    bool all_passed() const;
    const CheckOutcome* find(std::string_view check) const;
};

ScenarioMetrics compute_metrics(const ExperimentConfig& config);

/// Rate c for K_T that closes the terminal bound on this scenario (0 for M = 0).
double required_kt_rate(const ScenarioMetrics& metrics);

/// Maxima over the members; config overrides of the first member win.
Calibration fit_calibration(std::span<const ScenarioMetrics* const> members, const RateSpec& overrides);

ResultRecord evaluate(const ScenarioMetrics& metrics, const Calibration& calibration, std::size_t scenario_id = 0,
                      std::string role = "standalone");

/// compute_metrics + self calibration + evaluate.
ResultRecord run_scenario(const ExperimentConfig& config);

nlohmann::json to_json(const ResultRecord& record, bool include_timing = true);
ResultRecord record_from_json(const nlohmann::json& j);

}  // namespace freqlab::harness
