#include "freqlab/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "freqlab/error.hpp"
#include "freqlab/norms.hpp"

namespace freqlab {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Spatial operator L(t) u = lap u - b.grad u - c u restricted to interior unknowns.
SpMat assemble_operator(const Grid& grid, const CoefficientField& coef, double t, const std::vector<long>& num) {
    const auto interior = grid.interior_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(interior.size() * (1 + 2 * grid.dim()));
    for (std::size_t node : interior) {
        const long row = num[node];
        const Point x = grid.point(node);
        double diag = -coef.c(x, t);
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const double h = grid.spacing(a);
            const double inv_h2 = 1.0 / (h * h);
            const double adv = coef.b(a, x, t) / (2.0 * h);
            const std::size_t s = a == 0 ? 1 : grid.points(0);
            diag -= 2.0 * inv_h2;
            if (num[node - s] >= 0) trip.emplace_back(row, num[node - s], inv_h2 + adv);
            if (num[node + s] >= 0) trip.emplace_back(row, num[node + s], inv_h2 - adv);
        }
        trip.emplace_back(row, row, diag);
    }
    const long n = static_cast<long>(interior.size());
    SpMat L(n, n);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}

class Stepper1D {
public:
    Stepper1D(const Grid& grid, const CoefficientField& coef, double dt) : grid_(grid), coef_(coef), dt_(dt) {}

    Field step(const Field& u, double t_half) const {
        const auto interior = grid_.interior_nodes();
        const std::size_t n = interior.size();
        const double h = grid_.spacing(0);
        const double inv_h2 = 1.0 / (h * h);
        std::vector<double> lo(n), di(n), up(n), rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t node = interior[j];
            const Point x = grid_.point(node);
            const double adv = coef_.b(0, x, t_half) / (2.0 * h);
            const double l = inv_h2 + adv;
            const double d = -2.0 * inv_h2 - coef_.c(x, t_half);
            const double r = inv_h2 - adv;
            const double Lu = l * u[node - 1] + d * u[node] + r * u[node + 1];
            rhs[j] = u[node] + 0.5 * dt_ * Lu;
            lo[j] = -0.5 * dt_ * l;
            di[j] = 1.0 - 0.5 * dt_ * d;
            up[j] = -0.5 * dt_ * r;
        }
        const auto x = solve_tridiagonal(lo, di, up, rhs, 1e-12);
        Field next(grid_.node_count(), 0.0);
        for (std::size_t j = 0; j < n; ++j) next[interior[j]] = x[j];
        return next;
    }

private:
    const Grid& grid_;
    const CoefficientField& coef_;
    double dt_;
};

class Stepper2D {
public:
    Stepper2D(const Grid& grid, const CoefficientField& coef, double dt)
        : grid_(grid), coef_(coef), dt_(dt), num_(interior_numbering(grid)) {
        if (!coef.time_dependent()) prepare(0.0);
    }

    Field step(const Field& u, double t_half) {
        if (coef_.time_dependent() || !prepared_) prepare(t_half);
        const auto interior = grid_.interior_nodes();
        const long n = static_cast<long>(interior.size());
        Eigen::VectorXd un(n);
        for (long k = 0; k < n; ++k) un[k] = u[interior[static_cast<std::size_t>(k)]];
        const Eigen::VectorXd rhs = un + 0.5 * dt_ * (L_ * un);
        Eigen::VectorXd x;
        bool ok = false;
        if (coef_.has_advection()) {
            x = bicg_.solveWithGuess(rhs, un);
            ok = bicg_.info() == Eigen::Success;
        } else {
            x = cg_.solveWithGuess(rhs, un);
            ok = cg_.info() == Eigen::Success;
        }
        const double rel = (A_ * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
        require(ok && rel <= 1e-11, ErrorCode::LinearSolveFailure,
                "Krylov iteration did not reach the 1e-12 residual target");
        Field next(grid_.node_count(), 0.0);
        for (long k = 0; k < n; ++k) next[interior[static_cast<std::size_t>(k)]] = x[k];
        return next;
    }

private:
    void prepare(double t) {
        L_ = assemble_operator(grid_, coef_, t, num_);
        SpMat I(L_.rows(), L_.cols());
        I.setIdentity();
        A_ = I - 0.5 * dt_ * L_;
        colA_ = A_;
        if (coef_.has_advection()) {
            bicg_.setTolerance(1e-12);
            bicg_.setMaxIterations(20000);
            bicg_.compute(colA_);
        } else {
            cg_.setTolerance(1e-12);
            cg_.setMaxIterations(20000);
            cg_.compute(colA_);
        }
        prepared_ = true;
    }

    const Grid& grid_;
    const CoefficientField& coef_;
    double dt_;
    std::vector<long> num_;
    SpMat L_, A_;
    Eigen::SparseMatrix<double> colA_;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg_;
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::DiagonalPreconditioner<double>> bicg_;
    bool prepared_ = false;
};

}  // namespace

SolutionTrajectory solve_trajectory(const Grid& grid, const TimeGrid& time, const CoefficientField& coefficients,
                                    std::span<const double> u0) {
    check_dirichlet(grid, u0);
    require(coefficients.dim() == grid.dim(), ErrorCode::ShapeMismatch, "coefficient dimension differs from grid");
    for (double v : u0) require(std::isfinite(v), ErrorCode::Instability, "initial data is not finite");

    SolutionTrajectory traj{grid, time, {}, coefficients};
    traj.u.reserve(time.steps + 1);
    traj.u.emplace_back(u0.begin(), u0.end());
    for (std::size_t node : grid.boundary_nodes()) traj.u.front()[node] = 0.0;

    const double norm0 = l2_norm(grid, traj.u.front());
    const double dt = time.dt();
    auto guard = [&](const Field& u) {
        const double nrm = l2_norm(grid, u);
        require(std::isfinite(nrm) && nrm <= 1e6 * norm0 + (norm0 == 0.0 ? 0.0 : 1e-300), ErrorCode::Instability,
                "solution norm exceeded 1e6 times its initial value");
    };

    if (grid.dim() == 1) {
        Stepper1D stepper(grid, coefficients, dt);
        for (std::size_t n = 0; n < time.steps; ++n) {
            traj.u.push_back(stepper.step(traj.u.back(), time.time(n) + 0.5 * dt));
            guard(traj.u.back());
        }
    } else {
        Stepper2D stepper(grid, coefficients, dt);
        for (std::size_t n = 0; n < time.steps; ++n) {
            traj.u.push_back(stepper.step(traj.u.back(), time.time(n) + 0.5 * dt));
            guard(traj.u.back());
        }
    }
    return traj;
}

namespace {

Field central_source(const SolutionTrajectory& traj, std::size_t level, std::size_t stride) {
    const Grid& grid = traj.grid;
    const Field lap = apply_laplacian(grid, traj.u[level]);
    const double inv = 1.0 / (2.0 * static_cast<double>(stride) * traj.time.dt());
    const Field& up = traj.u[level + stride];
    const Field& um = traj.u[level - stride];
    Field f(grid.node_count(), 0.0);
    for (std::size_t node : grid.interior_nodes()) f[node] = (up[node] - um[node]) * inv - lap[node];
    return f;
}

}  // namespace

Field source_term(const SolutionTrajectory& traj, std::size_t level) {
    require(level >= 1 && level + 1 <= traj.time.steps, ErrorCode::IndexOutOfRange,
            "source term needs a central time difference");
    return central_source(traj, level, 1);
}

double PdeResidual::worst_margin() const {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k : interior) worst = std::min(worst, slack[k] + tolerance[k]);
    return worst;
}

PdeResidual pde_residual(const SolutionTrajectory& traj, std::size_t level) {
    const std::size_t steps = traj.time.steps;
    require(level + 1 <= steps, ErrorCode::IndexOutOfRange, "pde residual needs level <= steps-1");
    const Grid& grid = traj.grid;
    PdeResidual out;
    out.f.assign(grid.node_count(), 0.0);
    out.slack.assign(grid.node_count(), 0.0);
    out.tolerance.assign(grid.node_count(), 0.0);
    const auto inner = grid.interior_nodes();
    out.interior.assign(inner.begin(), inner.end());

    // Half level between level and level+1, where the Crank-Nicolson relation holds.
    const Field& u0 = traj.u[level];
    const Field& u1 = traj.u[level + 1];
    Field mid(grid.node_count());
    for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = 0.5 * (u0[k] + u1[k]);
    const Field lap = apply_laplacian(grid, mid);
    const auto grad = gradient(grid, mid);
    const double inv_dt = 1.0 / traj.time.dt();
    const double K = traj.coefficients.inequality_constant();
    double scale = 0.0;
    for (std::size_t node : inner) {
        const double ut = (u1[node] - u0[node]) * inv_dt;
        out.f[node] = ut - lap[node];
        double g2 = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) g2 += grad[node][a] * grad[node][a];
        out.slack[node] = K * (std::sqrt(g2) + std::abs(mid[node])) - std::abs(out.f[node]);
        scale = std::max(scale, std::abs(ut) + std::abs(lap[node]));
    }
    // f is a difference of two terms of size `scale`; the linear solves are
    // accurate to about 1e-12 of that.
    for (std::size_t node : inner) out.tolerance[node] = 1e-9 * scale;
    return out;
}

double check_growth_assumption(const SolutionTrajectory& traj) {
    const Grid& grid = traj.grid;
    const double M = traj.coefficients.M();
    const double nT = weighted_inner_product(grid, traj.terminal(), traj.terminal());
    double rate = 0.0;
    for (std::size_t level = 0; level < traj.time.steps; ++level) {
        const double nt = weighted_inner_product(grid, traj.u[level], traj.u[level]);
        if (nt == 0.0) {
            require(nT == 0.0, ErrorCode::DegenerateNorm, "solution vanishes at an intermediate level but not at T");
            continue;
        }
        const double ratio = nT / nt;
        if (ratio <= 1.0) continue;
        if (M == 0.0) return std::numeric_limits<double>::infinity();
        rate = std::max(rate, std::log(ratio) / (M * (traj.time.T - traj.time.time(level))));
    }
    return rate;
}

double check_assumption3(const SolutionTrajectory& traj, std::size_t level, const DirichletLaplacian& laplacian) {
    const Field f = source_term(traj, level);
    const double fn = hminus1_norm(laplacian, f);
    const double un = l2_norm(traj.grid, traj.u[level]);
    const double M = traj.coefficients.M();
    if (fn == 0.0 && un == 0.0) return 0.0;
    require(M > 0.0 && un > 0.0, ErrorCode::DegenerateNorm, "assumption-3 ratio undefined");
    return fn / (M * un);
}

}  // namespace freqlab
