#pragma once

// Crank-Nicolson solutions of
//     u_t - lap u + sum_i b_i(x,t) d_i u + c(x,t) u = 0,   u = 0 on the boundary,
// together with the pointwise and integral audits of the inequality
//     |u_t - lap u| <= M (|grad u| + |u|).

#include <cstdint>
#include <random>
#include <vector>

#include "freqlab/linalg.hpp"
#include "freqlab/mesh.hpp"

namespace freqlab {

struct TimeGrid {
    double T = 1.0;
    std::size_t steps = 1;

    static TimeGrid make(double T, std::size_t steps);
    double dt() const { return T / static_cast<double>(steps); }
    double time(std::size_t level) const {
        return level == steps ? T : static_cast<double>(level) * dt();
    }
};

/// Uniform double in [lo, hi) from the top 53 bits of a 64-bit draw, so that
/// sequences are reproducible across standard libraries.
double uniform(std::mt19937_64& gen, double lo = 0.0, double hi = 1.0);

/// Sum of cosine modes in normalized coordinates xi in [0,1]^n and s = t/T.
struct CosineSeries {
    struct Mode {
        std::array<int, kMaxDim> k{0, 0};
        double omega = 0.0;
        double phase = 0.0;
        double amplitude = 0.0;
    };
    double offset = 0.0;
    std::vector<Mode> modes;
    double scale = 1.0;

    double eval(const Point& xi, double s) const;
    bool is_constant() const { return modes.empty(); }
};

class CoefficientField {
public:
    enum class Kind { Zero, Constant, FourierRandom };

    static CoefficientField zero(std::size_t dim);
    static CoefficientField constant(std::vector<double> b, double c);
    /// Random truncated cosine series for every b_i and for c, each rescaled so
    /// that its largest sample over nodes x (levels and half levels) equals
    /// amplitude; hence M == amplitude exactly.
    static CoefficientField fourier_random(const Grid& grid, const TimeGrid& time, std::uint64_t seed,
                                           double amplitude, int modes = 4);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return b_.size(); }
    double b(std::size_t axis, const Point& x, double t) const;
    double c(const Point& x, double t) const;

    /// max of the sup norms of the b_i and c.
    double M() const { return M_; }
    /// Constant closing |b.grad u + c u| <= K (|grad u| + |u|) pointwise:
    /// max(sup |b|_2, sup |c|). Equals M in one dimension.
    double inequality_constant() const { return M_ineq_; }
    bool has_advection() const;
    bool time_dependent() const;

    /// Largest |sample| over the given grid and time levels (and half levels).
    double sample_sup(const Grid& grid, const TimeGrid& time) const;

private:
    Point normalized(const Point& x) const;
    void finalize(const Grid* grid, const TimeGrid* time);

    Kind kind_ = Kind::Zero;
    std::vector<CosineSeries> b_;
    CosineSeries c_;
    std::vector<AxisBounds> bounds_;
    double T_ = 1.0;
    double M_ = 0.0;
    double M_ineq_ = 0.0;
};

struct InitialData {
    enum class Kind { Zero, SineSeries, Bump, FourierRandom };

    Kind kind = Kind::SineSeries;
    /// SineSeries: coefficients of prod_a sin(k pi xi_a); entry k-1 holds mode k.
    std::vector<double> sine_coefficients{1.0};
    /// Second-axis mode for 2-D sine series.
    int transverse_mode = 1;
    Point bump_center{0.5, 0.5};
    double bump_width = 0.25;
    std::uint64_t seed = 1;
    int random_modes = 6;
    double scale = 1.0;

    static InitialData eigenfunction(int k);
    static InitialData zero();
};

Field make_initial_field(const Grid& grid, const InitialData& data);

struct SolutionTrajectory {
    Grid grid;
    TimeGrid time;
    std::vector<Field> u;
    CoefficientField coefficients;

    const Field& at(std::size_t level) const { return u.at(level); }
    const Field& initial() const { return u.front(); }
    const Field& terminal() const { return u.back(); }
};

SolutionTrajectory solve_trajectory(const Grid& grid, const TimeGrid& time, const CoefficientField& coefficients,
                                    std::span<const double> u0);

/// Residual at the half level t_{k+1/2}: u_t is the forward difference
/// between levels k and k+1 and the spatial terms act on their average, which
/// is the relation the Crank-Nicolson step satisfies.
struct PdeResidual {
    /// f = u_t - lap u.
    Field f;
    /// M_ineq (|grad u| + |u|) - |f| at interior nodes, zero on the boundary.
    Field slack;
    /// Round-off allowance for the cancellation in f, per node.
    Field tolerance;
    std::vector<std::size_t> interior;

    /// min over interior nodes of slack + tolerance (>= 0 means no violation).
    double worst_margin() const;
};

/// Half level between `level` and `level + 1`.
PdeResidual pde_residual(const SolutionTrajectory& traj, std::size_t level);

/// f = u_t - lap u at a level by central time differences (no slack work).
Field source_term(const SolutionTrajectory& traj, std::size_t level);

/// Smallest rate c with |u(T)|^2 <= exp(c M (T - t)) |u(t)|^2 at every level.
double check_growth_assumption(const SolutionTrajectory& traj);

/// |f|_{H^-1} / (M |u|_2) at a level; 0 when both norms vanish.
double check_assumption3(const SolutionTrajectory& traj, std::size_t level, const DirichletLaplacian& laplacian);

}  // namespace freqlab
