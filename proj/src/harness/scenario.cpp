#include "freqlab/harness/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "freqlab/caloric.hpp"
#include "freqlab/error.hpp"
#include "freqlab/frequency.hpp"
#include "freqlab/harness/registry.hpp"
#include "freqlab/norms.hpp"

namespace freqlab::harness {

std::string_view to_string(Status status) {
    switch (status) {
        case Status::Pass:
            return "pass";
        case Status::Fail:
            return "fail";
        case Status::NotApplicable:
            return "not-applicable";
    }
    return "?";
}

Status status_from_string(std::string_view text) {
    if (text == "pass") return Status::Pass;
    if (text == "fail") return Status::Fail;
    if (text == "not-applicable") return Status::NotApplicable;
    throw Error(ErrorCode::ParseError, "unknown check status '" + std::string(text) + "'");
}

bool ResultRecord::all_passed() const {
    return error.empty() && std::none_of(checks.begin(), checks.end(),
                                         [](const CheckOutcome& c) { return c.status == Status::Fail; });
}

const CheckOutcome* ResultRecord::find(std::string_view check) const {
    for (const auto& c : checks) {
        if (c.name == check) return &c;
    }
    return nullptr;
}

namespace {

constexpr double kScale = -8.0;
constexpr std::uint64_t kCaloricSeed = 20240917;
constexpr std::uint64_t kMultiplierSeed = 7700;

std::string grid_label(const Grid& grid) {
    std::string s = std::to_string(grid.points(0));
    for (std::size_t a = 1; a < grid.dim(); ++a) s += "x" + std::to_string(grid.points(a));
    return s;
}

CoefficientField make_coefficients(const ExperimentConfig& cfg, const Grid& grid, const TimeGrid& time) {
    const auto& c = cfg.coefficients;
    switch (c.kind) {
        case CoefficientField::Kind::Zero:
            return CoefficientField::zero(grid.dim());
        case CoefficientField::Kind::Constant:
            return CoefficientField::constant(c.b, c.c);
        case CoefficientField::Kind::FourierRandom:
            return CoefficientField::fourier_random(grid, time, c.seed, c.amplitude, c.modes);
    }
    return CoefficientField::zero(grid.dim());
}

double gamma_of(double m, double r, double M, double T) {
    const double cp = 4.0 * (4.0 * m + r * std::sqrt(m)) * std::exp(M * M * T);
    return r * r / (r * r + cp);
}

// Random bounded multiplier h (cosine modes) for the multiplier-lemma family.
Field random_multiplier(const Grid& grid, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    struct Mode {
        int k[kMaxDim];
        double phase, amp;
    };
    std::vector<Mode> modes(4);
    for (auto& m : modes) {
        for (std::size_t a = 0; a < kMaxDim; ++a) m.k[a] = static_cast<int>(gen() % 5);
        m.phase = uniform(gen, 0.0, 2.0 * std::numbers::pi);
        m.amp = uniform(gen, -1.0, 1.0);
    }
    const auto& dom = grid.domain();
    return grid.sample([&](const Point& x) {
        double v = 0.0;
        for (const auto& m : modes) {
            double arg = m.phase;
            for (std::size_t a = 0; a < grid.dim(); ++a) {
                arg += std::numbers::pi * m.k[a] * (x[a] - dom.bounds[a].lower) / dom.extent(a);
            }
            v += m.amp * std::cos(arg);
        }
        return v;
    });
}

void measure_multiplier(const ExperimentConfig& cfg, const Grid& grid, const DirichletLaplacian& lap,
                        LevelMetrics& lm) {
    double worst = 0.0;
    for (std::size_t s = 0; s < cfg.tolerances.multiplier_samples; ++s) {
        InitialData gd;
        gd.kind = InitialData::Kind::FourierRandom;
        gd.seed = kMultiplierSeed + 2 * s + 1;
        gd.random_modes = 5;
        const Field g = make_initial_field(grid, gd);
        const Field h = random_multiplier(grid, kMultiplierSeed + 2 * s);
        for (std::size_t a = 0; a < grid.dim(); ++a) worst = std::max(worst, check_multiplier_bound(lap, h, g, a));
    }
    lm.multiplier_ratio = worst;
    double ref = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) ref = std::max(ref, multiplier_reference_bound(grid, a));
    lm.multiplier_reference = ref;
}

template <class T>
nlohmann::json downsample(const std::vector<T>& v, std::size_t points) {
    nlohmann::json out = nlohmann::json::array();
    if (v.empty()) return out;
    const std::size_t n = std::min(points, v.size());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = n == 1 ? 0 : (i * (v.size() - 1) + (n - 1) / 2) / (n - 1);
        out.push_back(v[k]);
    }
    return out;
}

struct FinestExtras {
    nlohmann::json traces = nlohmann::json::object();
    FrequencyTrace trace;
    bool have_trace = false;
    CaloricWeight weight;
};

LevelMetrics measure_level(const ExperimentConfig& cfg, const Grid& grid, const TimeGrid& time,
                           const ObservationBall& ball, bool with_multiplier, ScenarioMetrics& sm,
                           FinestExtras* extras) {
    LevelMetrics lm;
    lm.grid = grid_label(grid);
    lm.steps = time.steps;
    lm.dt = time.dt();
    const std::size_t n = grid.dim();
    const double T = time.T;

    const CoefficientField coef = make_coefficients(cfg, grid, time);
    const double M = coef.M();
    sm.M = M;
    const Field u0 = make_initial_field(grid, cfg.initial_data(grid.domain()));
    const SolutionTrajectory traj = solve_trajectory(grid, time, coef, u0);

    lm.dirichlet_ok = true;
    for (std::size_t k = 0; k < traj.u.size() && lm.dirichlet_ok; ++k) {
        for (double v : traj.u[k]) {
            if (!std::isfinite(v)) {
                lm.dirichlet_ok = false;
                lm.dirichlet_detail = "non-finite value at level " + std::to_string(k);
                break;
            }
        }
        for (std::size_t node : grid.boundary_nodes()) {
            if (traj.u[k][node] != 0.0) {
                lm.dirichlet_ok = false;
                lm.dirichlet_detail = "nonzero boundary value at level " + std::to_string(k);
                break;
            }
        }
    }

    lm.masses = observed_masses(grid, traj.initial(), traj.terminal(), ball);
    const bool masses_ok = lm.masses.global0 > 0.0 && lm.masses.terminal > 0.0;
    lm.lambda = cfg.weight.lambda;
    if (cfg.weight.policy == LambdaPolicy::LambdaStar && masses_ok) {
        const double rate = cfg.rates.kt.value_or(0.0);
        const KTConstant K = compute_KT(lm.masses.global0, lm.masses.terminal, n, ball.m, M, T, rate, rate);
        lm.lambda = compute_constants(ball.m, ball.radius, M, T, K).lambda_star;
    }
    const CaloricWeight w = CaloricWeight::make(lm.lambda, ball.center, T, n);

    try {
        const FrequencyTrace tr = compute_trace(traj, w, M, cfg.rates.c0);
        lm.frequency_ok = true;
        lm.theta_min = std::numeric_limits<double>::infinity();
        lm.theta_reduced_gap = 0.0;
        for (std::size_t k = 0; k < tr.theta.size(); ++k) {
            if (tr.theta_scale[k] <= 0.0) continue;
            lm.theta_min = std::min(lm.theta_min, tr.theta[k] / tr.theta_scale[k]);
            lm.theta_reduced_gap =
                std::max(lm.theta_reduced_gap, std::abs(tr.theta[k] - tr.theta_reduced[k]) / tr.theta_scale[k]);
        }
        if (!std::isfinite(lm.theta_min)) lm.theta_min = 0.0;
        lm.monotonicity = fit_monotonicity_constant(tr, M, lm.lambda, T);
        lm.N_T = tr.N.back();
        lm.dH_residual = 0.0;
        for (std::size_t k = 1; k < time.steps; ++k) {
            lm.dH_residual = std::max(lm.dH_residual, check_dH_identity(traj, w, k).residual);
        }
        if (extras) {
            extras->trace = tr;
            extras->have_trace = true;
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateH) throw;
    }
    if (extras) extras->weight = w;

    const DirichletLaplacian lap(grid);
    NormTrace nt;
    try {
        nt = compute_norm_trace(traj, lap);
        lm.norms_ok = true;
        lm.zeta_growth = check_zeta_growth(nt, M, T);
        lm.zeta0 = nt.zeta.front();
        lm.hm1_0 = nt.hm1.front();
        lm.hm1_T = nt.hm1.back();
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateNorm) throw;
    }

    lm.energy_residual = 0.0;
    for (std::size_t k = 1; k < time.steps; ++k) {
        const auto er = check_energy_identities(traj, k, lap);
        lm.energy_residual = std::max({lm.energy_residual, er.residual1, er.residual2});
    }

    try {
        lm.growth_rate = check_growth_assumption(traj);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateNorm) throw;
    }

    lm.assumption3 = 0.0;
    for (std::size_t k = 1; k < time.steps; ++k) {
        if (M > 0.0) {
            lm.assumption3 = std::max(lm.assumption3, check_assumption3(traj, k, lap));
        } else {
            const double fn = hminus1_norm(lap, source_term(traj, k));
            const double un = l2_norm(grid, traj.u[k]);
            if (un > 0.0) lm.assumption3 = std::max(lm.assumption3, fn / un);
            else if (fn > 0.0) lm.assumption3 = std::numeric_limits<double>::infinity();
        }
    }

    lm.slack_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < time.steps; ++k) lm.slack_margin = std::min(lm.slack_margin, pde_residual(traj, k).worst_margin());

    const KTConstant Kg = compute_KT(1.0, 1.0, n, ball.m, M, T, 0.0, 0.0);
    const UCConstants uc = compute_constants(ball.m, ball.radius, M, T, Kg);
    lm.theorem_1_1 = verify_theorem_1_1(lm.masses, ball, uc);
    if (lm.norms_ok && lm.masses.global0 > 0.0) {
        lm.theorem_1_3 = verify_theorem_1_3(lm.masses, uc, lm.zeta0);
        lm.theorem_1_3_ok = true;
    }

    if (with_multiplier) measure_multiplier(cfg, grid, lap, lm);

    if (extras) {
        sm.terminal = traj.terminal();
        const std::size_t P = cfg.output.trace_points;
        auto& j = extras->traces;
        j["times"] = downsample(nt.times, P);
        if (extras->have_trace) {
            const auto& tr = extras->trace;
            j["times"] = downsample(tr.times, P);
            j["H"] = downsample(tr.H, P);
            j["D"] = downsample(tr.D, P);
            j["N"] = downsample(tr.N, P);
            j["theta"] = downsample(tr.theta, P);
            j["Phi"] = downsample(tr.Phi, P);
        }
        if (lm.norms_ok) {
            j["l2"] = downsample(nt.l2, P);
            j["h10"] = downsample(nt.h10, P);
            j["hm1"] = downsample(nt.hm1, P);
            j["zeta"] = downsample(nt.zeta, P);
        }
    }
    return lm;
}

void measure_caloric(ScenarioMetrics& sm, const CaloricWeight& w) {
    std::mt19937_64 gen(kCaloricSeed);
    const auto& dom = sm.finest_grid.domain();
    double worst = 0.0;
    for (int s = 0; s < 1000; ++s) {
        Point x{0.0, 0.0};
        for (std::size_t a = 0; a < dom.dim(); ++a) x[a] = uniform(gen, dom.bounds[a].lower, dom.bounds[a].upper);
        const double t = uniform(gen, 0.0, w.T);
        const auto r = check_heat_identity(w, x, t);
        if (r.scale > 0.0) worst = std::max(worst, std::abs(r.residual) / r.scale);
    }
    sm.caloric_residual = worst;
}

void measure_hardy(ScenarioMetrics& sm, const Point& x0) {
    const Grid& grid = sm.finest_grid;
    double worst = std::numeric_limits<double>::infinity();
    bool trivial = true;
    for (int e = -4; e <= 2; ++e) {
        const auto h = check_hardy(grid, sm.terminal, std::pow(10.0, e), x0);
        if (h.rhs == 0.0 && h.lhs == 0.0) continue;
        trivial = false;
        worst = std::min(worst, h.rhs > 0.0 ? (h.rhs - h.lhs) / h.rhs : -std::numeric_limits<double>::infinity());
    }
    sm.hardy_trivial = trivial;
    sm.hardy_margin = trivial ? 0.0 : worst;
}

double rel_gap(double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

void measure_scale(ScenarioMetrics& sm, const FinestExtras& ex, const ObservationBall& ball, const Field& u0) {
    const Grid& grid = sm.finest_grid;
    Field v = sm.terminal;
    for (double& x : v) x *= kScale;
    Field v0 = u0;
    for (double& x : v0) x *= kScale;
    double gap = 0.0;
    std::string detail;
    const LevelFrequency a = terminal_frequency(grid, sm.terminal, ex.weight);
    const LevelFrequency b = terminal_frequency(grid, v, ex.weight);
    if (a.H >= kDegenerateH && b.H >= kDegenerateH) {
        gap = std::max(gap, rel_gap(2.0 * a.D / a.H, 2.0 * b.D / b.H));
        gap = std::max(gap, rel_gap(a.theta / a.H, b.theta / b.H));
    }
    const KTConstant Kg = compute_KT(1.0, 1.0, grid.dim(), ball.m, sm.M, sm.T, 0.0, 0.0);
    const UCConstants uc = compute_constants(ball.m, ball.radius, sm.M, sm.T, Kg);
    const auto ra = verify_theorem_1_1(observed_masses(grid, u0, sm.terminal, ball), ball, uc);
    const auto rb = verify_theorem_1_1(observed_masses(grid, v0, v, ball), ball, uc);
    if (ra.trivial != rb.trivial || ra.vanishing_candidate != rb.vanishing_candidate) {
        gap = std::numeric_limits<double>::infinity();
        detail = "degeneracy flags differ after scaling";
    } else if (std::isfinite(ra.fitted_C) || std::isfinite(rb.fitted_C)) {
        gap = std::max(gap, rel_gap(ra.fitted_C, rb.fitted_C));
    }
    sm.scale_gap = gap;
    sm.scale_detail = detail;
}

}  // namespace

ScenarioMetrics compute_metrics(const ExperimentConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioMetrics sm;
    sm.config = config;
    sm.digest = config_digest(config);
    try {
        const Domain domain = config.make_domain();
        const ObservationBall ball = make_ball(domain, config.ball_center(), config.ball.radius);
        sm.dim = domain.dim();
        sm.T = config.time.T;
        sm.m = ball.m;
        sm.r = ball.radius;
        const std::size_t levels = config.grid.refinements + 1;
        FinestExtras extras;
        Field u0_finest;
        for (std::size_t l = 0; l < levels; ++l) {
            std::vector<std::size_t> pts;
            for (std::size_t p : config.grid.points) pts.push_back(((p - 1) << l) + 1);
            const Grid grid = build_grid(domain, pts);
            const TimeGrid time = TimeGrid::make(config.time.T, config.time.steps << l);
            const bool finest = l + 1 == levels;
            if (finest) sm.finest_grid = grid;
            sm.levels.push_back(
                measure_level(config, grid, time, ball, l == 0 || finest, sm, finest ? &extras : nullptr));
            if (finest) u0_finest = make_initial_field(grid, config.initial_data(domain));
        }
        sm.traces = extras.traces;
        measure_caloric(sm, extras.weight);
        measure_hardy(sm, ball.center);
        measure_scale(sm, extras, ball, u0_finest);
    } catch (const Error& e) {
        sm.error = e.what();
        switch (e.code()) {
            case ErrorCode::ParseError:
            case ErrorCode::ValidationError:
            case ErrorCode::IoError:
            case ErrorCode::InvalidGeometry:
            case ErrorCode::InvalidDomain:
            case ErrorCode::TooCoarse:
                sm.error_exit = 2;
                break;
            default:
                sm.error_exit = 3;
        }
    } catch (const std::exception& e) {
        sm.error = e.what();
        sm.error_exit = 3;
    }
    sm.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return sm;
}

namespace {

bool kt_available(const LevelMetrics& lm) { return lm.masses.global0 > 0.0 && lm.masses.terminal > 0.0; }

KTConstant kt_of(const ScenarioMetrics& sm, double rate) {
    const auto& lm = sm.finest();
    return compute_KT(lm.masses.global0, lm.masses.terminal, sm.dim, sm.m, sm.M, sm.T, rate, rate);
}

// Ratio of the largest to the smallest value; 1 when all are (numerically) zero,
// infinity when zero and nonzero values mix or a value is not finite.
double stability_ratio(const std::vector<double>& values, double zero = 1e-12) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    bool any_zero = false;
    for (double v : values) {
        if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
        if (std::abs(v) <= zero) {
            any_zero = true;
            continue;
        }
        lo = std::min(lo, std::abs(v));
        hi = std::max(hi, std::abs(v));
    }
    if (hi == 0.0) return 1.0;
    if (any_zero) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

template <class Fn>
std::vector<double> per_level(const ScenarioMetrics& sm, Fn&& fn) {
    std::vector<double> out;
    for (const auto& lm : sm.levels) out.push_back(fn(lm));
    return out;
}

CheckOutcome outcome(std::string_view name, bool pass, double margin, double fitted, std::string detail = {}) {
    return CheckOutcome{std::string(name), pass ? Status::Pass : Status::Fail, margin, fitted, std::move(detail)};
}

CheckOutcome not_applicable(std::string_view name, std::string detail) {
    return CheckOutcome{std::string(name), Status::NotApplicable, kNaN, kNaN, std::move(detail)};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Decrease under refinement: the finest value is at most half the previous one,
// or already negligible.
bool refines(const ScenarioMetrics& sm, double LevelMetrics::*field, double floor) {
    if (sm.levels.size() < 2) return true;
    const double fine = sm.levels.back().*field;
    const double coarse = sm.levels[sm.levels.size() - 2].*field;
    return fine <= 0.5 * coarse || fine <= floor;
}

double observed_order(const ScenarioMetrics& sm, double LevelMetrics::*field) {
    if (sm.levels.size() < 2) return kNaN;
    return std::log2(sm.levels[sm.levels.size() - 2].*field / sm.levels.back().*field);
}

CheckOutcome theorem_check(const ScenarioMetrics& sm, std::string_view name, bool is_13, double C_cal,
                           const std::optional<double>& override_C) {
    const auto& tol = sm.config.tolerances;
    const auto& lm = sm.finest();
    if (is_13 && !lm.theorem_1_3_ok) return not_applicable(name, "initial data vanish identically");
    const UCReport& rep = is_13 ? lm.theorem_1_3 : lm.theorem_1_1;
    if (rep.trivial) return outcome(name, true, 0.0, 0.0, "u == 0, inequality reads 0 <= 0");
    if (rep.vanishing_candidate) {
        const bool survived = sm.levels.size() >= 2 && (is_13 ? sm.levels[sm.levels.size() - 2].theorem_1_3
                                                              : sm.levels[sm.levels.size() - 2].theorem_1_1)
                                                           .vanishing_candidate;
        if (survived) return outcome(name, false, kNaN, rep.fitted_C, "vanishing-property counterexample");
        return not_applicable(name, "observation underflows on one level only; flag did not survive refinement");
    }
    const double C_ref = override_C ? *override_C : tol.theorem_slack * C_cal;
    if (!std::isfinite(C_ref)) return outcome(name, std::isfinite(rep.fitted_C), kNaN, rep.fitted_C, "no calibration constant");
    const double M = sm.M, T = sm.T;
    double q, bound;
    if (is_13) {
        q = std::log(rep.lhs) - std::log(rep.obs);
        bound = std::log(C_ref) + C_ref * rep.exponent_shape * std::exp(C_ref * M * M * T);
    } else {
        q = std::log(rep.lhs) - (1.0 - rep.gamma) * std::log(rep.global0) - rep.gamma * std::log(rep.obs);
        bound = std::log(C_ref) + C_ref * rep.exponent_shape;
    }
    const double margin = bound - q;
    std::vector<double> Cs;
    for (const auto& l : sm.levels) {
        const UCReport& r = is_13 ? l.theorem_1_3 : l.theorem_1_1;
        if (std::isfinite(r.fitted_C) && r.fitted_C > 0.0) Cs.push_back(r.fitted_C);
    }
    const double spread = Cs.size() == sm.levels.size() && !Cs.empty() ? refinement_spread(Cs) : kNaN;
    const bool spread_ok = sm.levels.size() < 2 || (std::isfinite(spread) && spread < tol.refinement_spread);
    std::string detail = "C_ref=" + fmt(C_ref) + " spread=" + fmt(spread);
    if (!is_13) detail += " C_printed_shape=" + fmt(rep.fitted_C_printed);
    return outcome(name, margin >= 0.0 && spread_ok && std::isfinite(rep.fitted_C), margin, rep.fitted_C, detail);
}

}  // namespace

double required_kt_rate(const ScenarioMetrics& sm) {
    if (!sm.error.empty() || sm.M == 0.0) return 0.0;
    const auto& lm = sm.finest();
    if (!kt_available(lm) || !lm.frequency_ok) return 0.0;
    const KTConstant K0 = kt_of(sm, 0.0);
    const double lam = lm.lambda, T = sm.T, M = sm.M;
    const double need = lam * std::exp(-M * M * T) * lm.N_T + 0.5 * static_cast<double>(sm.dim) -
                        (lam / T + 1.0) * K0.value;
    if (need <= 0.0) return 0.0;
    return need / ((lam / T + 1.0) * (M * M * T * T + M * T));
}

Calibration fit_calibration(std::span<const ScenarioMetrics* const> members, const RateSpec& overrides) {
    Calibration cal;
    cal.source = "sweep";
    double kt = 0.0, c11 = kNaN, c13 = kNaN, cexp = 0.0, clin = 0.0;
    auto upd = [](double& acc, double v) {
        if (!std::isfinite(v)) return;
        acc = std::isnan(acc) ? v : std::max(acc, v);
    };
    for (const ScenarioMetrics* sm : members) {
        if (!sm->error.empty()) continue;
        const auto& lm = sm->finest();
        kt = std::max(kt, required_kt_rate(*sm));
        if (!lm.theorem_1_1.trivial) upd(c11, lm.theorem_1_1.fitted_C);
        if (lm.theorem_1_3_ok) upd(c13, lm.theorem_1_3.fitted_C);
        if (sm->M > 0.0) {
            if (std::isfinite(lm.zeta_growth)) cexp = std::max(cexp, lm.zeta_growth);
            if (std::isfinite(lm.assumption3)) clin = std::max(clin, lm.assumption3);
        }
    }
    cal.kt_rate = overrides.kt.value_or(kt);
    cal.theorem_1_1_C = overrides.theorem_1_1.value_or(c11);
    cal.theorem_1_3_C = overrides.theorem_1_3.value_or(c13);
    cal.c_exp = overrides.zeta.value_or(cexp);
    cal.c_lin = overrides.assumption3.value_or(clin);
    return cal;
}

ResultRecord evaluate(const ScenarioMetrics& sm, const Calibration& cal, std::size_t scenario_id, std::string role) {
    ResultRecord rec;
    rec.scenario_id = scenario_id;
    rec.name = sm.config.name;
    rec.role = std::move(role);
    rec.config_digest = sm.digest;
    rec.config = to_json(sm.config);
    rec.T = sm.config.time.T;
    rec.wall_time = sm.wall_time;
    if (!sm.error.empty() || sm.levels.empty()) {
        rec.error = sm.error.empty() ? "no levels computed" : sm.error;
        rec.error_exit = sm.error_exit ? sm.error_exit : 3;
        for (const auto& c : check_registry()) rec.checks.push_back(outcome(c.name, false, kNaN, kNaN, rec.error));
        return rec;
    }
    const auto& cfg = sm.config;
    const auto& tol = cfg.tolerances;
    const auto& lm = sm.finest();
    const double M = sm.M, T = sm.T;
    const std::size_t n = sm.dim;
    rec.grid = lm.grid;
    rec.dt = lm.dt;
    rec.M = M;
    rec.lambda = lm.lambda;
    rec.gamma = gamma_of(sm.m, sm.r, M, T);
    rec.traces = sm.traces;

    const bool kt_ok = kt_available(lm);
    KTConstant K;
    UCConstants uc;
    if (kt_ok) {
        K = kt_of(sm, cal.kt_rate);
        if (K.value > 0.0) uc = compute_constants(sm.m, sm.r, M, T, K);
    }
    const bool uc_ok = kt_ok && K.value > 0.0;

    auto& out = rec.checks;
    // caloric_identities
    out.push_back(outcome("caloric_identities", sm.caloric_residual <= tol.caloric, tol.caloric - sm.caloric_residual,
                          kNaN, "max relative residual " + fmt(sm.caloric_residual)));

    // dH_identity
    if (!lm.frequency_ok) {
        out.push_back(not_applicable("dH_identity", "H underflows"));
    } else {
        const double t = tol.dH.value_or(M == 0.0 ? 1e-2 : 5e-2);
        const bool ok = lm.dH_residual <= t && refines(sm, &LevelMetrics::dH_residual, 1e-10);
        out.push_back(outcome("dH_identity", ok, t - lm.dH_residual, kNaN,
                              "residual " + fmt(lm.dH_residual) + " order " + fmt(observed_order(sm, &LevelMetrics::dH_residual))));
    }

    // theta_sign
    {
        bool all = true;
        double tmin = std::numeric_limits<double>::infinity(), gap = 0.0;
        for (const auto& l : sm.levels) {
            all = all && l.frequency_ok;
            if (!l.frequency_ok) continue;
            tmin = std::min(tmin, l.theta_min);
            gap = std::max(gap, l.theta_reduced_gap);
        }
        if (!all) {
            out.push_back(not_applicable("theta_sign", "H underflows"));
        } else {
            out.push_back(outcome("theta_sign", tmin >= -tol.theta_sign && gap <= tol.theta_reduced,
                                  tmin + tol.theta_sign, kNaN,
                                  "min theta/scale " + fmt(tmin) + " reduced-form gap " + fmt(gap)));
        }
    }

    // frequency_monotonicity
    if (!lm.frequency_ok) {
        out.push_back(not_applicable("frequency_monotonicity", "H underflows"));
    } else if (M == 0.0) {
        const double inc = lm.monotonicity.relative_increment;
        bool shrinking = true;
        if (sm.levels.size() >= 2) {
            const auto& prev = sm.levels[sm.levels.size() - 2];
            shrinking = !prev.frequency_ok || inc <= prev.monotonicity.relative_increment || inc <= 1e-12;
        }
        out.push_back(outcome("frequency_monotonicity", inc <= tol.monotonicity && shrinking, tol.monotonicity - inc,
                              lm.monotonicity.constant, "relative increment " + fmt(inc)));
    } else {
        const auto Cs = per_level(sm, [](const LevelMetrics& l) { return l.frequency_ok ? l.monotonicity.constant : kNaN; });
        const double ratio = stability_ratio(Cs);
        out.push_back(outcome("frequency_monotonicity", std::isfinite(lm.monotonicity.constant) && ratio <= tol.stability_factor,
                              tol.stability_factor - ratio, lm.monotonicity.constant,
                              "c0=" + fmt(cfg.rates.c0) + " level ratio " + fmt(ratio)));
    }

    // KT_constant
    if (!kt_ok) {
        out.push_back(not_applicable("KT_constant", "initial or terminal norm vanishes"));
    } else {
        const double sum = K.ratio_term + K.geometry_term + K.coeff_terms + K.dim_term;
        const bool ok = std::abs(K.value - sum) <= 1e-14 * std::abs(K.value) &&
                        (K.ratio_term < 0.0 || K.value >= 0.5 * static_cast<double>(n));
        out.push_back(outcome("KT_constant", ok, K.value - 0.5 * static_cast<double>(n), K.value,
                              "rate " + fmt(cal.kt_rate)));
    }

    // terminal_frequency_bound
    if (!kt_ok || !lm.frequency_ok) {
        out.push_back(not_applicable("terminal_frequency_bound", "K_T or N(T) undefined"));
    } else {
        const double margin = check_terminal_frequency_bound(lm.N_T, K, lm.lambda, T, M, n);
        out.push_back(outcome("terminal_frequency_bound", margin >= 0.0, margin, cal.kt_rate,
                              "N(T)=" + fmt(lm.N_T) + " K_T=" + fmt(K.value)));
    }

    // hardy_inequality
    out.push_back(outcome("hardy_inequality", sm.hardy_margin >= -tol.hardy, sm.hardy_margin, kNaN,
                          sm.hardy_trivial ? "f == 0" : "lambda in 1e-4 .. 1e2"));

    // lambda_star_backsubstitution, ball_estimate
    if (!uc_ok) {
        out.push_back(not_applicable("lambda_star_backsubstitution", "K_T undefined"));
        out.push_back(not_applicable("ball_estimate", "K_T undefined"));
    } else {
        const double gap = std::abs(uc.backsubstitution - 0.5);
        out.push_back(outcome("lambda_star_backsubstitution", gap <= tol.backsubstitution, tol.backsubstitution - gap,
                              uc.lambda_star, "prefactor term " + fmt(uc.backsubstitution)));
        const BallEstimate be =
            check_ball_estimate(sm.finest_grid, sm.terminal, cfg.ball_center(), K, sm.r, uc.lambda_star, M, T);
        const double margin = be.rhs > 0.0 ? (be.rhs - be.lhs) / be.rhs : (be.lhs <= 0.0 ? 0.0 : -1.0);
        out.push_back(outcome("ball_estimate", be.applicable && be.lhs <= be.rhs * (1.0 + 1e-12), margin, uc.lambda_star,
                              "prefactor " + fmt(be.prefactor) + " lhs " + fmt(be.lhs) + " rhs " + fmt(be.rhs)));
    }

    // energy_identities
    out.push_back(outcome("energy_identities",
                          lm.energy_residual <= tol.energy && refines(sm, &LevelMetrics::energy_residual, 1e-10),
                          tol.energy - lm.energy_residual, kNaN,
                          "residual " + fmt(lm.energy_residual) + " order " +
                              fmt(observed_order(sm, &LevelMetrics::energy_residual))));

    // zeta_growth
    if (!lm.norms_ok) {
        out.push_back(not_applicable("zeta_growth", "H^-1 norm vanishes"));
    } else if (M == 0.0) {
        out.push_back(outcome("zeta_growth", lm.zeta_growth <= tol.zeta, tol.zeta - lm.zeta_growth, lm.zeta_growth,
                              "max relative increment " + fmt(lm.zeta_growth)));
    } else {
        const auto rates = per_level(sm, [](const LevelMetrics& l) { return l.norms_ok ? l.zeta_growth : kNaN; });
        const double ratio = stability_ratio(rates, 1e-8);
        out.push_back(outcome("zeta_growth", std::isfinite(lm.zeta_growth) && ratio <= tol.stability_factor,
                              tol.stability_factor - ratio, lm.zeta_growth, "level ratio " + fmt(ratio)));
    }

    // backward_estimate
    if (!lm.norms_ok) {
        out.push_back(not_applicable("backward_estimate", "H^-1 norm vanishes"));
    } else {
        NormTrace nt;
        nt.times = {0.0, T};
        nt.hm1 = {lm.hm1_0, lm.hm1_T};
        nt.zeta = {lm.zeta0, lm.zeta0};
        const BackwardEstimate b = check_backward_estimate(nt, M, T, cal.c_exp, cal.c_lin);
        out.push_back(outcome("backward_estimate", b.margin >= -tol.backward * b.exponent, b.margin, cal.c_exp,
                              "relative slack " + fmt(b.relative_slack()) + " c_lin " + fmt(cal.c_lin)));
    }

    // assumption1_dirichlet
    {
        bool ok = true;
        std::string detail = "boundary values zero at every level";
        for (const auto& l : sm.levels) {
            if (!l.dirichlet_ok) {
                ok = false;
                detail = l.grid + ": " + l.dirichlet_detail;
            }
        }
        out.push_back(outcome("assumption1_dirichlet", ok, ok ? 0.0 : -1.0, kNaN, detail));
    }

    // assumption2_growth
    {
        const double c = lm.growth_rate;
        const bool ok = std::isfinite(c) && (M > 0.0 || c == 0.0);
        out.push_back(outcome("assumption2_growth", ok, ok ? 0.0 : -1.0, c,
                              std::isnan(c) ? "norm vanishes before T" : "fitted rate " + fmt(c)));
    }

    // assumption3_hminus1
    if (M > 0.0) {
        const auto rhos = per_level(sm, [](const LevelMetrics& l) { return l.assumption3; });
        const double ratio = stability_ratio(rhos);
        out.push_back(outcome("assumption3_hminus1", std::isfinite(lm.assumption3) && ratio <= tol.stability_factor,
                              tol.stability_factor - ratio, lm.assumption3, "max rho " + fmt(lm.assumption3)));
    } else {
        out.push_back(outcome("assumption3_hminus1", lm.assumption3 <= tol.assumption3_pure,
                              tol.assumption3_pure - lm.assumption3, lm.assumption3,
                              "max |f|_{H^-1}/|u|_2 " + fmt(lm.assumption3)));
    }

    // inequality_slack
    {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& l : sm.levels) worst = std::min(worst, l.slack_margin);
        out.push_back(outcome("inequality_slack", worst >= 0.0, worst, kNaN, "min slack + tolerance " + fmt(worst)));
    }

    // multiplier_bound
    {
        const auto& coarse = sm.levels.front();
        const double ratio = stability_ratio({coarse.multiplier_ratio, lm.multiplier_ratio});
        const bool ok = std::isfinite(lm.multiplier_ratio) && lm.multiplier_ratio <= lm.multiplier_reference &&
                        ratio <= tol.stability_factor;
        out.push_back(outcome("multiplier_bound", ok, lm.multiplier_reference - lm.multiplier_ratio, lm.multiplier_ratio,
                              "reference " + fmt(lm.multiplier_reference) + " level ratio " + fmt(ratio)));
    }

    // scale_invariance
    out.push_back(outcome("scale_invariance", sm.scale_gap <= 1e-12, 1e-12 - sm.scale_gap, kNaN,
                          sm.scale_detail.empty() ? "max relative change " + fmt(sm.scale_gap) : sm.scale_detail));

    out.push_back(theorem_check(sm, "theorem_1_1", false, cal.theorem_1_1_C, cfg.rates.theorem_1_1));
    out.push_back(theorem_check(sm, "theorem_1_3", true, cal.theorem_1_3_C, cfg.rates.theorem_1_3));

    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : sm.levels) {
        levels.push_back({{"grid", l.grid},
                          {"dt", l.dt},
                          {"lambda", l.lambda},
                          {"dH_residual", l.dH_residual},
                          {"energy_residual", l.energy_residual},
                          {"monotonicity_constant", l.frequency_ok ? l.monotonicity.constant : kNaN},
                          {"zeta_growth", l.zeta_growth},
                          {"growth_rate", l.growth_rate},
                          {"assumption3", l.assumption3},
                          {"theorem_1_1_C", l.theorem_1_1.fitted_C},
                          {"theorem_1_3_C", l.theorem_1_3_ok ? l.theorem_1_3.fitted_C : kNaN},
                          {"multiplier_ratio", l.multiplier_ratio}});
    }
    rec.constants = {{"calibration_source", cal.source},
                     {"calibration_members", cal.members},
                     {"kt_rate", cal.kt_rate},
                     {"theorem_1_1_C", cal.theorem_1_1_C},
                     {"theorem_1_3_C", cal.theorem_1_3_C},
                     {"c_exp", cal.c_exp},
                     {"c_lin", cal.c_lin},
                     {"c0", cfg.rates.c0},
                     {"K_T", uc_ok ? K.value : kNaN},
                     {"lambda_star", uc_ok ? uc.lambda_star : kNaN},
                     {"C_prime", 4.0 * (4.0 * sm.m + sm.r * std::sqrt(sm.m)) * std::exp(M * M * T)},
                     {"m", sm.m},
                     {"r", sm.r},
                     {"levels", levels}};
    return rec;
}

ResultRecord run_scenario(const ExperimentConfig& config) {
    const ScenarioMetrics sm = compute_metrics(config);
    const ScenarioMetrics* members[] = {&sm};
    Calibration cal = fit_calibration(members, config.rates);
    cal.source = "self";
    cal.members = {0};
    return evaluate(sm, cal);
}

namespace {

double num(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

nlohmann::json to_json(const ResultRecord& r, bool include_timing) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"status", std::string(to_string(c.status))},
                          {"margin", c.margin},
                          {"fitted_constant", c.fitted_constant},
                          {"detail", c.detail}});
    }
    nlohmann::json j = {{"scenario_id", r.scenario_id},
                        {"name", r.name},
                        {"role", r.role},
                        {"config_digest", r.config_digest},
                        {"config", r.config},
                        {"grid", r.grid},
                        {"dt", r.dt},
                        {"M", r.M},
                        {"T", r.T},
                        {"lambda", r.lambda},
                        {"gamma", r.gamma},
                        {"checks", checks},
                        {"constants", r.constants.is_null() ? nlohmann::json::object() : r.constants},
                        {"traces", r.traces.is_null() ? nlohmann::json::object() : r.traces},
                        {"error", r.error}};
    if (include_timing) j["wall_time_s"] = r.wall_time;
    return j;
}

ResultRecord record_from_json(const nlohmann::json& j) {
    try {
        ResultRecord r;
        r.scenario_id = j.at("scenario_id").get<std::size_t>();
        r.name = j.at("name").get<std::string>();
        r.role = j.at("role").get<std::string>();
        r.config_digest = j.at("config_digest").get<std::string>();
        r.config = j.at("config");
        r.grid = j.at("grid").get<std::string>();
        r.dt = num(j.at("dt"));
        r.M = num(j.at("M"));
        r.T = num(j.at("T"));
        r.lambda = num(j.at("lambda"));
        r.gamma = num(j.at("gamma"));
        for (const auto& c : j.at("checks")) {
            r.checks.push_back(CheckOutcome{c.at("name").get<std::string>(),
                                            status_from_string(c.at("status").get<std::string>()),
                                            num(c.at("margin")), num(c.at("fitted_constant")),
                                            c.at("detail").get<std::string>()});
        }
        r.constants = j.at("constants");
        r.traces = j.at("traces");
        r.error = j.at("error").get<std::string>();
        r.wall_time = j.contains("wall_time_s") ? num(j.at("wall_time_s")) : 0.0;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed result record: ") + e.what());
    }
}

}  // namespace freqlab::harness
