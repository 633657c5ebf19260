#pragma once

// Linear solves shared by the time stepper and the discrete H^-1 norm.

#include <memory>
#include <span>
#include <vector>

#include "freqlab/mesh.hpp"

namespace freqlab {

/// Thomas algorithm. lower[0] and upper[n-1] are ignored. Throws
/// LinearSolveFailure on a vanishing pivot or when the relative residual
/// exceeds tol.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs,
                                      double tol = 1e-12);

/// Dense index of each interior node (or -1 for boundary nodes).
std::vector<long> interior_numbering(const Grid& grid);

/// Factorized -Laplacian with homogeneous Dirichlet conditions. Immutable after
/// construction; solve() is safe to call concurrently.
class DirichletLaplacian {
public:
    explicit DirichletLaplacian(const Grid& grid);
    ~DirichletLaplacian();
    DirichletLaplacian(DirichletLaplacian&&) noexcept;
    DirichletLaplacian& operator=(DirichletLaplacian&&) noexcept;

    /// Returns v with -lap_h v = rhs at interior nodes and v = 0 on the boundary.
    Field solve(std::span<const double> rhs) const;

    const Grid& grid() const { return *grid_; }

private:
    struct Impl;
    std::shared_ptr<const Grid> grid_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace freqlab
