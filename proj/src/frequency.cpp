#include "freqlab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "freqlab/error.hpp"

namespace freqlab {

LevelFrequency frequency_at(const Grid& grid, std::span<const double> u, const CaloricWeight& w, double t) {
    check_shape(grid, u);
    const auto grad = gradient(grid, u);
    const auto cm = grid.cell_measures();
    const std::size_t dim = grid.dim();
    LevelFrequency out;
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        const double G = eval_weight(w, grid.point(node), t);
        double g2 = 0.0;
        for (std::size_t a = 0; a < dim; ++a) g2 += grad[node][a] * grad[node][a];
        out.H += u[node] * u[node] * G * cm[node];
        out.D += g2 * G * cm[node];
    }

    const auto bnodes = grid.boundary_nodes();
    for (std::size_t slot = 0; slot < bnodes.size(); ++slot) {
        const double sw = grid.surface_weight(slot);
        if (sw == 0.0) continue;
        const std::size_t node = bnodes[slot];
        const Point x = grid.point(node);
        const Point& nu = grid.outward_normal(slot);
        const Point gG = eval_weight_gradient(w, x, t);
        const Point& gu = grad[node];
        double g2 = 0.0, dnu_u = 0.0, dnu_G = 0.0, gu_gG = 0.0;
        for (std::size_t a = 0; a < dim; ++a) {
            g2 += gu[a] * gu[a];
            dnu_u += gu[a] * nu[a];
            dnu_G += gG[a] * nu[a];
            gu_gG += gu[a] * gG[a];
        }
        out.theta += sw * (g2 * dnu_G - 2.0 * dnu_u * gu_gG);
        out.theta_reduced -= sw * dnu_u * dnu_u * dnu_G;
        out.theta_scale += sw * (g2 * std::abs(dnu_G) + 2.0 * std::abs(dnu_u * gu_gG));
    }
    return out;
}

namespace {

FrequencyTrace sized_trace(const CaloricWeight& w, double M, double rate, std::size_t levels) {
    FrequencyTrace tr;
    tr.weight = w;
    tr.M = M;
    tr.rate = rate;
    for (auto* v : {&tr.times, &tr.H, &tr.D, &tr.N, &tr.theta, &tr.theta_reduced, &tr.theta_scale, &tr.Phi}) {
        v->assign(levels, 0.0);
    }
    return tr;
}

// Returns false when H underflows at this level.
bool fill_level(const SolutionTrajectory& traj, std::size_t level, FrequencyTrace& tr) {
    const double t = traj.time.time(level);
    const LevelFrequency lf = frequency_at(traj.grid, traj.u[level], tr.weight, t);
    tr.times[level] = t;
    tr.H[level] = lf.H;
    tr.D[level] = lf.D;
    tr.theta[level] = lf.theta;
    tr.theta_reduced[level] = lf.theta_reduced;
    tr.theta_scale[level] = lf.theta_scale;
    if (!(lf.H >= kDegenerateH)) return false;
    tr.N[level] = 2.0 * lf.D / lf.H;
    tr.Phi[level] = tr.weight.tau(t) * std::exp(-tr.rate * tr.M * tr.M * t) * tr.N[level];
    return true;
}

void check_inputs(const SolutionTrajectory& traj, const CaloricWeight& w) {
    require(w.n == traj.grid.dim(), ErrorCode::ShapeMismatch, "weight dimension differs from grid");
    require(std::abs(w.T - traj.time.T) <= 1e-14 * traj.time.T, ErrorCode::ValidationError,
            "weight and trajectory disagree on T");
}

}  // namespace

FrequencyTrace compute_trace(const SolutionTrajectory& traj, const CaloricWeight& w, double M, double rate) {
    check_inputs(traj, w);
    const std::size_t levels = traj.u.size();
    FrequencyTrace tr = sized_trace(w, M, rate, levels);
    const long count = static_cast<long>(levels);
    long first_bad = count;
#pragma omp parallel for schedule(static) reduction(min : first_bad)
    for (long k = 0; k < count; ++k) {
        if (!fill_level(traj, static_cast<std::size_t>(k), tr)) first_bad = std::min(first_bad, k);
    }
    require(first_bad == count, ErrorCode::DegenerateH, "H underflows at level " + std::to_string(first_bad));
    return tr;
}

namespace serial {

FrequencyTrace compute_trace(const SolutionTrajectory& traj, const CaloricWeight& w, double M, double rate) {
    check_inputs(traj, w);
    FrequencyTrace tr = sized_trace(w, M, rate, traj.u.size());
    for (std::size_t k = 0; k < traj.u.size(); ++k) {
        require(fill_level(traj, k, tr), ErrorCode::DegenerateH, "H underflows at level " + std::to_string(k));
    }
    return tr;
}

}  // namespace serial

DHIdentity check_dH_identity(const SolutionTrajectory& traj, const CaloricWeight& w, std::size_t level) {
    require(level >= 1 && level + 1 <= traj.time.steps, ErrorCode::IndexOutOfRange,
            "dH identity needs an interior time level");
    const Grid& grid = traj.grid;
    auto H_at = [&](std::size_t k) {
        const Field G = sample_weight(grid, w, traj.time.time(k));
        return weighted_inner_product(grid, traj.u[k], traj.u[k], G);
    };
    const double t = traj.time.time(level);
    const LevelFrequency lf = frequency_at(grid, traj.u[level], w, t);
    const Field G = sample_weight(grid, w, t);
    const Field f = source_term(traj, level);

    DHIdentity out;
    out.dH_dt = (H_at(level + 1) - H_at(level - 1)) / (2.0 * traj.time.dt());
    out.minus_2D = -2.0 * lf.D;
    out.source = 2.0 * weighted_inner_product(grid, traj.u[level], f, G);
    out.residual = std::abs(out.dH_dt - (out.minus_2D + out.source)) /
                   (std::abs(out.dH_dt) + std::abs(out.minus_2D) + 1e-300);
    return out;
}

std::vector<double> rescaled_frequency(const FrequencyTrace& trace, double rate) {
    std::vector<double> phi(trace.N.size());
    for (std::size_t k = 0; k < phi.size(); ++k) {
        const double t = trace.times[k];
        phi[k] = trace.weight.tau(t) * std::exp(-rate * trace.M * trace.M * t) * trace.N[k];
    }
    return phi;
}

MonotonicityFit fit_monotonicity_constant(const FrequencyTrace& trace, double M, double lambda, double T) {
    require(trace.Phi.size() >= 3, ErrorCode::InsufficientFamily, "monotonicity fit needs at least 3 levels");
    for (double h : trace.H) require(h >= kDegenerateH, ErrorCode::DegenerateH, "trace contains a degenerate level");
    MonotonicityFit fit;
    fit.rate = trace.rate;
    const auto& phi = trace.Phi;
    for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
        const double inc = phi[k + 1] - phi[k];
        fit.max_increment = std::max(fit.max_increment, inc);
        if (M > 0.0) {
            const double dt = trace.times[k + 1] - trace.times[k];
            fit.constant = std::max(fit.constant, inc / (M * M * (T + lambda) * dt));
        }
    }
    if (M == 0.0) fit.constant = fit.max_increment;
    fit.relative_increment = phi.front() != 0.0 ? fit.max_increment / std::abs(phi.front()) : fit.max_increment;
    return fit;
}

KTConstant compute_KT(double initial_mass, double terminal_mass, std::size_t n, double m, double M, double T,
                      double c1, double c2) {
    require(terminal_mass > 0.0 && initial_mass > 0.0, ErrorCode::DegenerateNorm,
            "K_T needs nonzero initial and terminal norms");
    KTConstant k;
    k.c1 = c1;
    k.c2 = c2;
    k.ratio_term = 4.0 * std::log(initial_mass / terminal_mass);
    k.geometry_term = 2.0 * m / T;
    k.coeff_terms = c1 * M * M * T * T + c2 * M * T;
    k.dim_term = 0.5 * static_cast<double>(n);
    k.value = k.ratio_term + k.geometry_term + k.coeff_terms + k.dim_term;
    return k;
}

KTConstant compute_KT(const SolutionTrajectory& traj, double m, double M, double T, double c1, double c2) {
    const Grid& grid = traj.grid;
    return compute_KT(weighted_inner_product(grid, traj.initial(), traj.initial()),
                      weighted_inner_product(grid, traj.terminal(), traj.terminal()), grid.dim(), m, M, T, c1, c2);
}

LevelFrequency terminal_frequency(const Grid& grid, std::span<const double> uT, const CaloricWeight& w) {
    return frequency_at(grid, uT, w, w.T);
}

double check_terminal_frequency_bound(double N_T, const KTConstant& KT, double lambda, double T, double M,
                                      std::size_t n) {
    return (lambda / T + 1.0) * KT.value - lambda * std::exp(-M * M * T) * N_T - 0.5 * static_cast<double>(n);
}

double check_terminal_frequency_bound(const FrequencyTrace& trace, const KTConstant& KT, double lambda, double T,
                                      double M) {
    require(!trace.N.empty() && std::abs(trace.times.back() - T) <= 1e-14 * T, ErrorCode::IndexOutOfRange,
            "trace does not reach T");
    require(trace.H.back() >= kDegenerateH, ErrorCode::DegenerateH, "H vanishes at T");
    return check_terminal_frequency_bound(trace.N.back(), KT, lambda, T, M, trace.weight.n);
}

HardyResult check_hardy(const Grid& grid, std::span<const double> fld, double lambda, const Point& x0) {
    check_dirichlet(grid, fld);
    require(lambda > 0.0, ErrorCode::ValidationError, "lambda must be positive");
    const auto grad = gradient(grid, fld);
    const auto cm = grid.cell_measures();
    double moment = 0.0, energy = 0.0, mass = 0.0;
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        const double r2 = squared_distance(grid.point(node), x0, grid.dim());
        const double e = std::exp(-r2 / (4.0 * lambda));
        double g2 = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) g2 += grad[node][a] * grad[node][a];
        const double f2 = fld[node] * fld[node];
        moment += r2 * f2 * e * cm[node];
        energy += g2 * e * cm[node];
        mass += f2 * e * cm[node];
    }
    return HardyResult{moment / (8.0 * lambda), 2.0 * lambda * energy + 0.5 * static_cast<double>(grid.dim()) * mass};
}

BallEstimate check_ball_estimate(const Grid& grid, std::span<const double> uT, const Point& x0, const KTConstant& KT,
                                 double r, double lambda, double M, double T) {
    check_shape(grid, uT);
    require(r > 0.0 && lambda > 0.0, ErrorCode::ValidationError, "radius and lambda must be positive");
    BallEstimate b;
    b.factor = 8.0 * std::exp(M * M * T) * lambda * (lambda / T + 1.0) * KT.value;
    b.prefactor = 1.0 - b.factor / (r * r);
    const auto cm = grid.cell_measures();
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
        const double r2 = squared_distance(grid.point(node), x0, grid.dim());
        const double weighted = uT[node] * uT[node] * std::exp(-r2 / (4.0 * lambda)) * cm[node];
        b.moment += r2 * weighted;
        if (r2 < r * r) b.ball_mass += weighted;
    }
    b.lhs = b.prefactor * b.moment;
    b.rhs = b.factor * b.ball_mass;
    b.applicable = b.prefactor >= 0.0;
    return b;
}

}  // namespace freqlab
