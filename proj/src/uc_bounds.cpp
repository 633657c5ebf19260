#include "freqlab/uc_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "freqlab/error.hpp"

namespace freqlab {

double ball_prefactor_term(double lambda, double r, double M, double T, double KT) {
    return 8.0 * std::exp(M * M * T) * lambda * (lambda / T + 1.0) * KT / (r * r);
}

UCConstants compute_constants(double m, double r, double M, double T, const KTConstant& KT) {
    require(r > 0.0 && T > 0.0, ErrorCode::InvalidGeometry, "radius and final time must be positive");
    require(m >= r * r, ErrorCode::InvalidGeometry, "m must be at least r^2");
    require(KT.value > 0.0, ErrorCode::InvalidGeometry, "K_T must be positive");
    UCConstants c;
    c.m = m;
    c.r = r;
    c.M = M;
    c.T = T;
    c.KT = KT;
    // Root of lambda^2 + T lambda - q T = 0 with q = r^2/(16 K_T e^{M^2T});
    // written without the cancellation in (-T + sqrt(T^2 + 4qT))/2.
    const double s = r * r * T / (4.0 * KT.value * std::exp(M * M * T));
    c.lambda_star = 0.5 * s / (T + std::sqrt(T * T + s));
    c.C_prime = 4.0 * (4.0 * m + r * std::sqrt(m)) * std::exp(M * M * T);
    c.gamma = r * r / (r * r + c.C_prime);
    c.backsubstitution = ball_prefactor_term(c.lambda_star, r, M, T, KT.value);
    return c;
}

ObservedMasses observed_masses(const Grid& grid, std::span<const double> u0, std::span<const double> uT,
                               const ObservationBall& ball) {
    check_shape(grid, u0);
    check_shape(grid, uT);
    ObservedMasses out;
    const auto cm = grid.cell_measures();
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        out.global0 += u0[node] * u0[node] * cm[node];
        const double w = uT[node] * uT[node] * cm[node];
        out.terminal += w;
        if (ball.contains(grid.point(node), grid.dim())) out.obs += w;
    }
    return out;
}

namespace {

// Smallest y with g(y) >= 0 for increasing g.
template <class Fn>
double solve_increasing(Fn&& g, double start) {
    double hi = start;
    double step = 1.0;
    while (g(hi) < 0.0) {
        hi += step;
        step *= 2.0;
    }
    double lo = hi - 1.0;
    step = 1.0;
    while (g(lo) >= 0.0) {
        lo -= step;
        step *= 2.0;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) >= 0.0 ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double closing_constant(double q, double S) {
    require(S >= 0.0 && std::isfinite(q), ErrorCode::ValidationError, "closing constant needs S >= 0 and finite q");
    if (S == 0.0) return std::exp(q);
    // g(y) = y + e^y S - q is increasing in y = ln C.
    const double y = solve_increasing([&](double y) { return y + std::exp(y) * S - q; }, std::min(q, 0.0));
    return std::exp(y);
}

UCReport verify_theorem_1_1(const ObservedMasses& masses, const ObservationBall& ball, const UCConstants& constants,
                            double reference_C) {
    (void)ball;
    UCReport rep;
    rep.lhs = masses.terminal;
    rep.global0 = masses.global0;
    rep.obs = masses.obs;
    rep.gamma = constants.gamma;
    const double M = constants.M, T = constants.T;
    rep.exponent_shape = 2.0 * constants.m / T + M * M * T * T + M * T;
    rep.printed_shape = 1.0 / T + M * T + M * M * T * T;
    if (rep.lhs == 0.0) {
        rep.trivial = true;
        rep.log_margin = 0.0;
        return rep;
    }
    if (rep.obs < 1e-280) {
        rep.vanishing_candidate = rep.lhs > 1e-8;
        rep.fitted_C = std::numeric_limits<double>::infinity();
        rep.fitted_C_printed = rep.fitted_C;
        return rep;
    }
    const double q = std::log(rep.lhs) - (1.0 - rep.gamma) * std::log(rep.global0) - rep.gamma * std::log(rep.obs);
    rep.fitted_C = closing_constant(q, rep.exponent_shape);
    rep.fitted_C_printed = closing_constant(q, rep.printed_shape);
    if (std::isfinite(reference_C)) rep.log_margin = std::log(reference_C) + reference_C * rep.exponent_shape - q;
    return rep;
}

UCReport verify_theorem_1_1(const SolutionTrajectory& traj, const ObservationBall& ball, const UCConstants& constants,
                            double reference_C) {
    return verify_theorem_1_1(observed_masses(traj.grid, traj.initial(), traj.terminal(), ball), ball, constants,
                              reference_C);
}

namespace {

// Smallest C with ln C + C * shape * exp(C M^2 T) >= q.
double closing_constant_13(double q, double shape, double M, double T) {
    if (shape == 0.0) return std::exp(q);
    const double y = solve_increasing(
        [&](double y) {
            const double C = std::exp(y);
            return y + C * shape * std::exp(C * M * M * T) - q;
        },
        std::min(q, 0.0));
    return std::exp(y);
}

}  // namespace

UCReport verify_theorem_1_3(const ObservedMasses& masses, const UCConstants& constants, double zeta0,
                            double reference_C) {
    require(masses.global0 > 0.0, ErrorCode::ZeroInitialData, "initial data vanish identically");
    UCReport rep;
    rep.lhs = masses.global0;
    rep.global0 = masses.global0;
    rep.obs = masses.obs;
    rep.gamma = constants.gamma;
    const double M = constants.M, T = constants.T;
    rep.printed_shape = (1.0 / T + 1.0 + M * T + M * M * T * T) * zeta0;
    rep.exponent_shape = rep.printed_shape;
    if (rep.obs < 1e-280) {
        rep.vanishing_candidate = true;
        rep.fitted_C = std::numeric_limits<double>::infinity();
        rep.fitted_C_printed = rep.fitted_C;
        return rep;
    }
    const double q = std::log(rep.lhs) - std::log(rep.obs);
    rep.fitted_C = closing_constant_13(q, rep.exponent_shape, M, T);
    rep.fitted_C_printed = rep.fitted_C;
    if (std::isfinite(reference_C)) {
        rep.log_margin = std::log(reference_C) + reference_C * rep.exponent_shape * std::exp(reference_C * M * M * T) - q;
    }
    return rep;
}

UCReport verify_theorem_1_3(const SolutionTrajectory& traj, const ObservationBall& ball, const UCConstants& constants,
                            double zeta0, double reference_C) {
    return verify_theorem_1_3(observed_masses(traj.grid, traj.initial(), traj.terminal(), ball), constants, zeta0,
                              reference_C);
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y, double* var_x) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (var_x) *var_x = sxx / n;
    return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

GammaFit empirical_gamma_fit(const std::vector<UCReport>& family) {
    require(family.size() >= 5, ErrorCode::InsufficientFamily, "gamma fit needs at least 5 reports");
    std::vector<double> ll, lo, nl, no;
    for (const auto& r : family) {
        require(r.lhs > 0.0 && r.obs > 0.0 && r.global0 > 0.0, ErrorCode::DegenerateNorm,
                "gamma fit needs positive masses");
        ll.push_back(std::log(r.lhs));
        lo.push_back(std::log(r.obs));
        nl.push_back(std::log(r.lhs / r.global0));
        no.push_back(std::log(r.obs / r.global0));
    }
    GammaFit fit;
    fit.formula_gamma = family.front().gamma;
    fit.raw_slope = ls_slope(ll, lo, nullptr);
    double var = 0.0;
    const double g = ls_slope(no, nl, &var);
    fit.degenerate = !(var > 1e-20) || !std::isfinite(g);
    fit.gamma_hat = fit.degenerate ? fit.raw_slope : g;
    return fit;
}

double refinement_spread(const std::vector<double>& values) {
    require(!values.empty(), ErrorCode::InsufficientFamily, "refinement spread needs values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    require(*lo > 0.0, ErrorCode::DegenerateNorm, "refinement spread needs positive values");
    return *hi / *lo;
}

}  // namespace freqlab
