#include "freqlab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "freqlab/error.hpp"

namespace freqlab {

double hminus1_norm(const DirichletLaplacian& laplacian, std::span<const double> fld) {
    const Grid& grid = laplacian.grid();
    check_dirichlet(grid, fld);
    if (max_abs(fld) == 0.0) return 0.0;
    const Field v = laplacian.solve(fld);
    return std::sqrt(std::max(0.0, weighted_inner_product(grid, fld, v)));
}

double hminus1_norm(const Grid& grid, std::span<const double> fld) {
    return hminus1_norm(DirichletLaplacian(grid), fld);
}

double h10_norm(const Grid& grid, std::span<const double> fld) {
    const Field lap = apply_laplacian(grid, fld);
    return std::sqrt(std::max(0.0, -weighted_inner_product(grid, lap, fld)));
}

double first_dirichlet_eigenvalue(const Grid& grid) {
    double mu = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(grid.points(a) - 1)));
        mu += 4.0 / (h * h) * s * s;
    }
    return mu;
}

double max_dirichlet_eigenvalue(const Grid& grid) {
    double mu = 0.0;
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        const double N = static_cast<double>(grid.points(a) - 1);
        const double s = std::sin(std::numbers::pi * (N - 1.0) / (2.0 * N));
        mu += 4.0 / (h * h) * s * s;
    }
    return mu;
}

namespace {

void fill_level(const SolutionTrajectory& traj, const DirichletLaplacian& lap, std::size_t level, NormTrace& out) {
    const Grid& grid = traj.grid;
    const Field& u = traj.u[level];
    out.times[level] = traj.time.time(level);
    out.l2[level] = l2_norm(grid, u);
    out.h10[level] = h10_norm(grid, u);
    out.hm1[level] = hminus1_norm(lap, u);
    const double hm1_sq = out.hm1[level] * out.hm1[level];
    require(hm1_sq > 1e-300, ErrorCode::DegenerateNorm,
            "H^-1 norm underflows at level " + std::to_string(level));
    out.zeta[level] = out.l2[level] * out.l2[level] / hm1_sq;
}

NormTrace sized_trace(std::size_t levels) {
    NormTrace t;
    t.times.assign(levels, 0.0);
    t.l2.assign(levels, 0.0);
    t.h10.assign(levels, 0.0);
    t.hm1.assign(levels, 0.0);
    t.zeta.assign(levels, 0.0);
    return t;
}

}  // namespace

NormTrace compute_norm_trace(const SolutionTrajectory& traj, const DirichletLaplacian& laplacian) {
    const std::size_t levels = traj.u.size();
    NormTrace out = sized_trace(levels);
    const long count = static_cast<long>(levels);
    bool failed = false;
    std::string message;
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) {
        try {
            fill_level(traj, laplacian, static_cast<std::size_t>(k), out);
        } catch (const Error& e) {
#pragma omp critical(freqlab_norm_trace)
            {
                if (!failed) message = e.what();
                failed = true;
            }
        }
    }
    require(!failed, ErrorCode::DegenerateNorm, message);
    return out;
}

namespace serial {

NormTrace compute_norm_trace(const SolutionTrajectory& traj, const DirichletLaplacian& laplacian) {
    NormTrace out = sized_trace(traj.u.size());
    for (std::size_t k = 0; k < traj.u.size(); ++k) fill_level(traj, laplacian, k, out);
    return out;
}

}  // namespace serial

EnergyResiduals check_energy_identities(const SolutionTrajectory& traj, std::size_t level,
                                        const DirichletLaplacian& laplacian) {
    require(level >= 1 && level + 1 <= traj.time.steps, ErrorCode::IndexOutOfRange,
            "energy identities need an interior time level");
    const Grid& grid = traj.grid;
    const Field& u = traj.u[level];
    const Field& up = traj.u[level + 1];
    const Field& um = traj.u[level - 1];
    const double dt2 = 2.0 * traj.time.dt();
    const Field f = source_term(traj, level);

    EnergyResiduals r;
    const double l2 = weighted_inner_product(grid, u, u);
    r.l2_squared = l2;
    r.f_dot_u = weighted_inner_product(grid, f, u);

    // 1/2 d/dt |u|^2 + |u|_{H1}^2 - <f,u>
    const double d1 = 0.5 * (weighted_inner_product(grid, up, up) - weighted_inner_product(grid, um, um)) / dt2;
    const double h1 = h10_norm(grid, u);
    const double t1 = h1 * h1;
    const double scale1 = std::max({std::abs(d1), t1, std::abs(r.f_dot_u)});
    r.residual1 = scale1 > 0.0 ? std::abs(d1 + t1 - r.f_dot_u) / scale1 : 0.0;

    // 1/2 d/dt |u|_{H-1}^2 + |u|^2 - <f,(-lap)^-1 u>
    const double hp = hminus1_norm(laplacian, up);
    const double hm = hminus1_norm(laplacian, um);
    const double d2 = 0.5 * (hp * hp - hm * hm) / dt2;
    const double f_dot_inv = max_abs(u) == 0.0 ? 0.0 : weighted_inner_product(grid, f, laplacian.solve(u));
    const double scale2 = std::max({std::abs(d2), l2, std::abs(f_dot_inv)});
    r.residual2 = scale2 > 0.0 ? std::abs(d2 + l2 - f_dot_inv) / scale2 : 0.0;
    return r;
}

double check_zeta_growth(const NormTrace& trace, double M, double T) {
    (void)T;
    require(M >= 0.0, ErrorCode::ValidationError, "M must be nonnegative");
    require(!trace.zeta.empty() && trace.zeta.front() > 0.0, ErrorCode::DegenerateNorm, "zeta(0) undefined");
    const double z0 = trace.zeta.front();
    double out = 0.0;
    if (M == 0.0) {
        for (std::size_t k = 1; k < trace.zeta.size(); ++k) {
            out = std::max(out, (trace.zeta[k] - trace.zeta[k - 1]) / z0);
        }
        return out;
    }
    for (std::size_t k = 1; k < trace.zeta.size(); ++k) {
        const double t = trace.times[k];
        if (t <= 0.0) continue;
        out = std::max(out, std::log(trace.zeta[k] / z0) / (M * M * t));
    }
    return out;
}

BackwardEstimate check_backward_estimate(const NormTrace& trace, double M, double T, double c_exp, double c_lin) {
    require(!trace.hm1.empty(), ErrorCode::DegenerateNorm, "empty norm trace");
    const double h0 = trace.hm1.front();
    const double hT = trace.hm1.back();
    require(h0 > 0.0 && hT > 0.0, ErrorCode::DegenerateNorm, "H^-1 norm vanishes at an end point");
    const double z0 = trace.zeta.front();
    BackwardEstimate b;
    b.exponent = 2.0 * std::exp(c_exp * M * M * T) * (z0 + c_lin * M * std::sqrt(z0)) * T;
    b.log_lhs = 2.0 * std::log(h0);
    b.log_rhs = b.exponent + 2.0 * std::log(hT);
    b.margin = b.log_rhs - b.log_lhs;
    return b;
}

double check_multiplier_bound(const DirichletLaplacian& laplacian, std::span<const double> h,
                              std::span<const double> g, std::size_t axis) {
    const Grid& grid = laplacian.grid();
    check_shape(grid, h);
    check_dirichlet(grid, g);
    const double gn = l2_norm(grid, g);
    require(gn > 0.0, ErrorCode::DegenerateNorm, "multiplier bound needs g != 0");
    const double hs = max_abs(h);
    if (hs == 0.0) return 0.0;
    const Field dg = partial_derivative(grid, g, axis);
    Field prod(grid.node_count(), 0.0);
    for (std::size_t node : grid.interior_nodes()) prod[node] = h[node] * dg[node];
    return hminus1_norm(laplacian, prod) / (hs * gn);
}

double multiplier_reference_bound(const Grid& grid, std::size_t axis) {
    return grid.domain().extent(axis) + 1.0 / std::sqrt(first_dirichlet_eigenvalue(grid));
}

}  // namespace freqlab
