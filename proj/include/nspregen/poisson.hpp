#pragma once

#include <span>
#include <vector>

#include "nspregen/geometry.hpp"

namespace nspregen::solver {

enum class Preconditioner { DIC, Jacobi };

struct PoissonOptions {
    double tol = 1e-6;       ///< stop when |r|_2 <= tol |b|_2
    double rel_tol = 0.0;    ///< or when |r|_2 <= rel_tol |r_0|_2 (0 disables)
    double abs_inf_tol = 0;  ///< additionally require |r|_inf <= abs_inf_tol (0 disables)
    int max_iters = 5000;
};

struct PoissonStats {
    int iterations = 0;
    double residual_norm = 0.0;  ///< final |r|_2
    double rhs_norm = 0.0;
    Preconditioner preconditioner = Preconditioner::DIC;
};

/// Five-point Laplacian on the fluid cells of a mask.
///
/// Solid cells and outer walls close the stencil with a zero-flux condition.
/// With `dirichlet_east`, fluid cells in the last column see p = 0 on the
/// east boundary face (FPO outlet) and the operator is nonsingular;
/// otherwise constants span its null space.
///
/// Unknowns are the fluid cells in row-major order; `cell_index()` maps a
/// grid cell to its unknown or -1.
class PressureSolver {
public:
    PressureSolver(const geometry::BinaryMask& mask, bool dirichlet_east);

    std::size_t size() const noexcept { return diag_.size(); }
    bool singular() const noexcept { return !dirichlet_east_; }
    int cell_index(int i, int j) const noexcept { return index_[static_cast<std::size_t>(j) * w_ + i]; }
    Preconditioner preconditioner() const noexcept { return precond_; }

    /// y = L x, the (negative semidefinite) discrete Laplacian.
    void apply_laplacian(std::span<const double> x, std::span<double> y) const;

    /// Solves L x = b by preconditioned CG, using `x` as the initial guess.
    /// Throws PressureDiverged after `max_iters` iterations.
    PoissonStats solve(std::span<const double> b, std::span<double> x,
                       const PoissonOptions& opt) const;

    /// Subtracts the mean so that sum(x) = 0.
    static void remove_mean(std::span<double> x);

private:
    void factorize();
    void precondition(std::span<const double> r, std::span<double> z) const;

    int w_ = 0;
    int h_ = 0;
    bool dirichlet_east_ = false;
    std::vector<int> index_;
    // A = -L: positive diagonal, off-diagonals -c; neighbors as unknown ids or -1.
    std::vector<double> diag_;
    std::vector<int> west_, east_, south_, north_;
    double cx_ = 0.0;  ///< 1/dx^2
    double cy_ = 0.0;  ///< 1/dy^2
    std::vector<double> inv_pivot_;
    Preconditioner precond_ = Preconditioner::DIC;
};

struct PoissonResult {
    std::vector<double> p;  ///< full grid, zero on solid cells
    PoissonStats stats;
};

/// Solves the discrete Poisson problem Lap(p) = rhs on the fluid cells of
/// `mask` with zero-flux closure everywhere. `rhs` is a full H*W cell field
/// (solid entries ignored) whose fluid sum must vanish to 1e-10 relative;
/// otherwise IncompatibleRhs. The solution has zero mean over fluid cells.
PoissonResult solve_pressure_poisson(std::span<const double> rhs,
                                     const geometry::BinaryMask& mask,
                                     const PoissonOptions& opt = {});

}  // namespace nspregen::solver
