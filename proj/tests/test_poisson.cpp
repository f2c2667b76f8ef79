#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "nspregen/errors.hpp"
#include "nspregen/poisson.hpp"
#include "nspregen/rng.hpp"

using namespace nspregen;
using namespace nspregen::solver;
using geometry::BinaryMask;

namespace {

// Dense Neumann Laplacian on the fluid cells, bordered by the zero-mean
// constraint so the system is nonsingular.
std::vector<double> dense_oracle(const BinaryMask& m, const std::vector<double>& rhs) {
    const int W = m.dims.w, H = m.dims.h;
    std::vector<int> id(W * H, -1);
    int n = 0;
    for (int k = 0; k < W * H; ++k) {
        if (m.fluid[k]) id[k] = n++;
    }
    const double cx = 1.0 / (m.dx() * m.dx()), cy = 1.0 / (m.dy() * m.dy());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            const int r = id[j * W + i];
            if (r < 0) continue;
            b(r) = rhs[j * W + i];
            const int nb[4][3] = {{i - 1, j, 0}, {i + 1, j, 0}, {i, j - 1, 1}, {i, j + 1, 1}};
            for (const auto& q : nb) {
                if (q[0] < 0 || q[0] >= W || q[1] < 0 || q[1] >= H) continue;
                const int c = id[q[1] * W + q[0]];
                if (c < 0) continue;
                const double w = q[2] == 0 ? cx : cy;
                A(r, c) += w;
                A(r, r) -= w;
            }
            A(r, n) = 1.0;
            A(n, r) = 1.0;
        }
    }
    const Eigen::VectorXd x = A.fullPivLu().solve(b);
    std::vector<double> p(W * H, 0.0);
    for (int k = 0; k < W * H; ++k) {
        if (id[k] >= 0) p[k] = x(id[k]);
    }
    return p;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, den = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - b[k]) * (a[k] - b[k]);
        den += b[k] * b[k];
    }
    return std::sqrt(num / den);
}

std::vector<double> compatible_rhs(const BinaryMask& m, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> r(m.fluid.size(), 0.0);
    double sum = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (m.fluid[k]) {
            r[k] = rng.uniform(-1.0, 1.0);
            sum += r[k];
        }
    }
    const double mean = sum / static_cast<double>(m.fluid_count());
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (m.fluid[k]) r[k] -= mean;
    }
    return r;
}

}  // namespace

TEST_CASE("zero rhs gives zero pressure") {
    const auto m = BinaryMask::all_fluid({16, 16}, {});
    const auto res = solve_pressure_poisson(std::vector<double>(256, 0.0), m);
    for (double v : res.p) CHECK(v == 0.0);
}

TEST_CASE("nonzero-mean rhs is rejected") {
    const auto m = BinaryMask::all_fluid({16, 16}, {});
    CHECK_THROWS_AS(solve_pressure_poisson(std::vector<double>(256, 1.0), m), IncompatibleRhs);
}

TEST_CASE("single Fourier mode on an all-fluid 32x32 grid matches the dense solve") {
    const auto m = BinaryMask::all_fluid({32, 32}, {});
    std::vector<double> rhs(32 * 32);
    for (int j = 0; j < 32; ++j) {
        for (int i = 0; i < 32; ++i) {
            const double x = (i + 0.5) / 16.0, y = (j + 0.5) / 16.0;
            rhs[j * 32 + i] = std::cos(M_PI * x) * std::cos(2 * M_PI * y / 2.0);
        }
    }
    PoissonOptions opt;
    opt.tol = 1e-13;
    const auto res = solve_pressure_poisson(rhs, m, opt);
    CHECK(rel_err(res.p, dense_oracle(m, rhs)) <= 1e-8);
    CHECK(res.stats.preconditioner == Preconditioner::DIC);
}

TEST_CASE("masked grids: residual bound, zero mean and dense agreement") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        geometry::SamplingParams sp;
        const auto obs = geometry::sample_obstacles(3, sp, seed);
        const auto m = geometry::rasterize_mask(obs, {32, 32});
        if (!geometry::fluid_connected(m)) continue;
        const auto rhs = compatible_rhs(m, seed + 100);

        PoissonOptions opt;
        const auto loose = solve_pressure_poisson(rhs, m, opt);
        CHECK(loose.stats.residual_norm <= opt.tol * loose.stats.rhs_norm);

        opt.tol = 1e-13;
        const auto res = solve_pressure_poisson(rhs, m, opt);
        double mean = 0;
        for (std::size_t k = 0; k < res.p.size(); ++k) {
            if (m.fluid[k]) mean += res.p[k];
            else CHECK(res.p[k] == 0.0);
        }
        CHECK(std::abs(mean) < 1e-9);
        CHECK(rel_err(res.p, dense_oracle(m, rhs)) <= 1e-8);
    }
}

TEST_CASE("Dirichlet outlet makes the operator nonsingular") {
    const auto m = BinaryMask::all_fluid({8, 8}, {});
    PressureSolver s(m, true);
    CHECK(!s.singular());
    std::vector<double> b(s.size(), 1.0), x(s.size(), 0.0);
    PoissonOptions opt;
    opt.tol = 1e-12;
    s.solve(b, x, opt);
    std::vector<double> lx(s.size());
    s.apply_laplacian(x, lx);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(lx[k] == doctest::Approx(b[k]).epsilon(1e-9));
}

TEST_CASE("iteration cap raises") {
    const auto m = BinaryMask::all_fluid({32, 32}, {});
    PoissonOptions opt;
    opt.tol = 1e-14;
    opt.max_iters = 2;
    CHECK_THROWS_AS(solve_pressure_poisson(compatible_rhs(m, 3), m, opt), PressureDiverged);
}
