#include "nspregen/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nspregen/errors.hpp"

namespace nspregen::solver {

PressureSolver::PressureSolver(const geometry::BinaryMask& mask, bool dirichlet_east)
    : w_(mask.dims.w), h_(mask.dims.h), dirichlet_east_(dirichlet_east) {
    const double dx = mask.dx();
    const double dy = mask.dy();
    cx_ = 1.0 / (dx * dx);
    cy_ = 1.0 / (dy * dy);

    index_.assign(mask.fluid.size(), -1);
    int n = 0;
    for (std::size_t k = 0; k < mask.fluid.size(); ++k) {
        if (mask.fluid[k]) index_[k] = n++;
    }
    diag_.assign(n, 0.0);
    west_.assign(n, -1);
    east_.assign(n, -1);
    south_.assign(n, -1);
    north_.assign(n, -1);

    for (int j = 0; j < h_; ++j) {
        for (int i = 0; i < w_; ++i) {
            const int c = cell_index(i, j);
            if (c < 0) continue;
            if (i > 0 && cell_index(i - 1, j) >= 0) {
                west_[c] = cell_index(i - 1, j);
                diag_[c] += cx_;
            }
            if (i + 1 < w_ && cell_index(i + 1, j) >= 0) {
                east_[c] = cell_index(i + 1, j);
                diag_[c] += cx_;
            }
            if (i + 1 == w_ && dirichlet_east_) {
                // p = 0 on the boundary face, half a cell away.
                diag_[c] += 2.0 * cx_;
            }
            if (j > 0 && cell_index(i, j - 1) >= 0) {
                south_[c] = cell_index(i, j - 1);
                diag_[c] += cy_;
            }
            if (j + 1 < h_ && cell_index(i, j + 1) >= 0) {
                north_[c] = cell_index(i, j + 1);
                diag_[c] += cy_;
            }
        }
    }
    factorize();
}

void PressureSolver::factorize() {
    // Diagonal-based incomplete Cholesky: only the diagonal is modified, which
    // for the five-point stencil coincides with IC(0).
    const std::size_t n = diag_.size();
    std::vector<double> pivot(diag_);
    bool ok = true;
    for (std::size_t c = 0; c < n; ++c) {
        if (west_[c] >= 0) pivot[c] -= cx_ * cx_ / pivot[west_[c]];
        if (south_[c] >= 0) pivot[c] -= cy_ * cy_ / pivot[south_[c]];
        if (!(pivot[c] > 1e-12 * diag_[c])) {
            ok = false;
            break;
        }
    }
    inv_pivot_.resize(n);
    if (ok) {
        precond_ = Preconditioner::DIC;
        for (std::size_t c = 0; c < n; ++c) inv_pivot_[c] = 1.0 / pivot[c];
    } else {
        precond_ = Preconditioner::Jacobi;
        for (std::size_t c = 0; c < n; ++c) inv_pivot_[c] = diag_[c] > 0.0 ? 1.0 / diag_[c] : 0.0;
    }
}

void PressureSolver::apply_laplacian(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag_.size();
    for (std::size_t c = 0; c < n; ++c) {
        double s = -diag_[c] * x[c];
        if (west_[c] >= 0) s += cx_ * x[west_[c]];
        if (east_[c] >= 0) s += cx_ * x[east_[c]];
        if (south_[c] >= 0) s += cy_ * x[south_[c]];
        if (north_[c] >= 0) s += cy_ * x[north_[c]];
        y[c] = s;
    }
}

void PressureSolver::precondition(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = diag_.size();
    if (precond_ == Preconditioner::Jacobi) {
        for (std::size_t c = 0; c < n; ++c) z[c] = r[c] * inv_pivot_[c];
        return;
    }
    // M = (P - Lo) P^-1 (P - Lo^T), off-diagonals of A are -cx, -cy.
    for (std::size_t c = 0; c < n; ++c) {
        double s = r[c];
        if (west_[c] >= 0) s += cx_ * z[west_[c]];
        if (south_[c] >= 0) s += cy_ * z[south_[c]];
        z[c] = s * inv_pivot_[c];
    }
    for (std::size_t c = n; c-- > 0;) {
        double s = 0.0;
        if (east_[c] >= 0) s += cx_ * z[east_[c]];
        if (north_[c] >= 0) s += cy_ * z[north_[c]];
        z[c] += s * inv_pivot_[c];
    }
}

void PressureSolver::remove_mean(std::span<double> x) {
    if (x.empty()) return;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (double& v : x) v -= mean;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double inf_norm(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

PoissonStats PressureSolver::solve(std::span<const double> b, std::span<double> x,
                                   const PoissonOptions& opt) const {
    // Work with A = -L so the system A x = -b is positive (semi)definite.
    const std::size_t n = diag_.size();
    std::vector<double> r(n), z(n), d(n), q(n);

    apply_laplacian(x, q);
    for (std::size_t c = 0; c < n; ++c) r[c] = q[c] - b[c];  // -b - A x with A x = -L x
    if (singular()) remove_mean(r);

    PoissonStats st;
    st.preconditioner = precond_;
    st.rhs_norm = std::sqrt(dot(b, b));
    if (st.rhs_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return st;
    }
    double rnorm = std::sqrt(dot(r, r));
    const double r0 = rnorm;

    auto converged = [&](double rn) {
        const bool norm_ok = rn <= opt.tol * st.rhs_norm || (opt.rel_tol > 0.0 && rn <= opt.rel_tol * r0);
        if (!norm_ok) return false;
        return opt.abs_inf_tol <= 0.0 || inf_norm(r) <= opt.abs_inf_tol;
    };

    if (rnorm == 0.0 || converged(rnorm)) {
        st.residual_norm = rnorm;
        return st;
    }

    precondition(r, z);
    d = z;
    double rz = dot(r, z);
    for (int it = 1; it <= opt.max_iters; ++it) {
        // q = A d
        apply_laplacian(d, q);
        for (double& v : q) v = -v;
        const double dq = dot(d, q);
        if (!(dq > 0.0)) {
            st.iterations = it;
            st.residual_norm = rnorm;
            if (rnorm <= 1e-14 * st.rhs_norm) return st;
            throw PressureDiverged("CG breakdown: search direction has non-positive curvature");
        }
        const double alpha = rz / dq;
        for (std::size_t c = 0; c < n; ++c) {
            x[c] += alpha * d[c];
            r[c] -= alpha * q[c];
        }
        if (singular()) remove_mean(r);
        rnorm = std::sqrt(dot(r, r));
        st.iterations = it;
        st.residual_norm = rnorm;
        if (converged(rnorm)) return st;

        precondition(r, z);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t c = 0; c < n; ++c) d[c] = z[c] + beta * d[c];
    }
    throw PressureDiverged("pressure solve did not converge in " + std::to_string(opt.max_iters) +
                           " iterations (residual " + std::to_string(rnorm / std::max(st.rhs_norm, 1e-300)) +
                           " relative)");
}

PoissonResult solve_pressure_poisson(std::span<const double> rhs,
                                     const geometry::BinaryMask& mask,
                                     const PoissonOptions& opt) {
    if (rhs.size() != mask.fluid.size()) throw InvalidArgument("rhs size does not match the mask");
    PressureSolver solver(mask, false);
    const std::size_t n = solver.size();
    if (n == 0) throw AllSolid("mask contains no fluid cell");

    std::vector<double> b(n);
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (!mask.fluid[k]) continue;
        const double v = rhs[k];
        b[solver.cell_index(static_cast<int>(k % mask.dims.w), static_cast<int>(k / mask.dims.w))] = v;
        sum += v;
        abs_sum += std::abs(v);
    }
    if (std::abs(sum) > 1e-10 * abs_sum) {
        throw IncompatibleRhs("right-hand side has nonzero mean over fluid cells");
    }
    // Strip the round-off residue of the mean so CG sees an exactly compatible system.
    PressureSolver::remove_mean(b);

    std::vector<double> x(n, 0.0);
    PoissonResult res;
    res.stats = solver.solve(b, x, opt);
    PressureSolver::remove_mean(x);
    res.p.assign(rhs.size(), 0.0);
    for (std::size_t k = 0; k < rhs.size(); ++k) {
        if (mask.fluid[k]) {
            res.p[k] = x[solver.cell_index(static_cast<int>(k % mask.dims.w), static_cast<int>(k / mask.dims.w))];
        }
    }
    return res;
}

}  // namespace nspregen::solver
