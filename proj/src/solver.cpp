#include "nspregen/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "nspregen/trajio.hpp"

namespace nspregen::solver {

using physics::FlowKind;

void SolverParams::validate() const {
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidArgument("cfl must lie in (0, 1]");
    if (!(p_tol > 0.0 && p_rel_tol >= 0.0 && u_tol > 0.0 && div_tol > 0.0)) {
        throw InvalidArgument("solver tolerances must be positive");
    }
    if (grid.h < 8 || grid.w < 8) throw InvalidArgument("solver grid must be at least 8x8");
    if (max_cg_iters < 1 || max_sgs_sweeps < 1 || max_steps < 1) {
        throw InvalidArgument("iteration limits must be positive");
    }
}

CaseSetup build_case(const geometry::ObstacleSet& obs, const physics::BoundarySetup& boundary,
                     const physics::FluidParams& fluid, const SolverParams& params) {
    params.validate();
    if (!(fluid.nu > 0.0 && fluid.L > 0.0 && fluid.H > 0.0)) {
        throw InvalidArgument("fluid parameters must be positive");
    }
    if (!(boundary.speed >= 0.0) || !(boundary.re > 0.0)) {
        throw InvalidArgument("boundary speed and Re must be positive");
    }
    if (boundary.kind == FlowKind::FPO && std::abs(obs.domain.ly - fluid.H) > 1e-12 * fluid.H) {
        throw InvalidArgument("FPO channel height must equal the domain height");
    }

    CaseSetup c;
    c.kind = boundary.kind;
    c.obstacles = obs;
    c.mask = geometry::rasterize_mask(obs, params.grid);

    std::vector<int> labels;
    const int components = geometry::label_fluid_components(c.mask, labels);
    if (components != 1) {
        throw DisconnectedDomain("fluid region has " + std::to_string(components) +
                                 " connected components");
    }
    if (c.kind == FlowKind::FPO) {
        bool inlet = false;
        bool outlet = false;
        for (int j = 0; j < c.mask.dims.h; ++j) {
            inlet = inlet || c.mask.is_fluid(0, j);
            outlet = outlet || c.mask.is_fluid(c.mask.dims.w - 1, j);
        }
        if (!inlet || !outlet) throw DisconnectedDomain("fluid region does not reach inlet and outlet");
    }

    c.sdf = geometry::compute_sdf(c.mask);
    c.boundary = boundary;
    c.schedule = physics::schedule_end_time(boundary.re, fluid);
    c.fluid = fluid;
    c.solver = params;
    c.export_grid = params.grid;
    c.seed = obs.seed;
    return c;
}

FlowState initial_state(const CaseSetup& c) {
    FlowState s(c.mask.dims.w, c.mask.dims.h);
    if (c.kind == FlowKind::FPO) {
        const double dy = c.mask.dy();
        for (int j = 0; j < s.H; ++j) {
            if (c.mask.is_fluid(0, j)) {
                s.U(0, j) = physics::inlet_profile(c.boundary.speed, c.fluid.H, (j + 0.5) * dy);
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Stepper

Stepper::Stepper(const CaseSetup& c)
    : case_(c),
      W_(c.mask.dims.w),
      H_(c.mask.dims.h),
      dx_(c.mask.dx()),
      dy_(c.mask.dy()),
      lid_(c.kind == FlowKind::LDC ? c.boundary.speed : 0.0),
      fpo_(c.kind == FlowKind::FPO),
      pressure_(c.mask, c.kind == FlowKind::FPO) {
    build_stencils();
    phi_.assign(pressure_.size(), 0.0);
    pu_.assign(static_cast<std::size_t>(W_ + 5) * (H_ + 4), 0.0);
    pv_.assign(static_cast<std::size_t>(W_ + 4) * (H_ + 5), 0.0);
    b_.assign(pressure_.size(), 0.0);
}

void Stepper::build_stencils() {
    const auto& m = case_.mask;
    const std::size_t nu = static_cast<std::size_t>(W_ + 1) * H_;
    const std::size_t nv = static_cast<std::size_t>(W_) * (H_ + 1);
    ukind_.assign(nu, kSolid);
    vkind_.assign(nv, kSolid);
    ufixed_.assign(nu, 0.0);
    auto uid = [&](int i, int j) { return j * (W_ + 1) + i; };
    auto vid = [&](int i, int j) { return j * W_ + i; };

    for (int j = 0; j < H_; ++j) {
        for (int i = 0; i <= W_; ++i) {
            std::uint8_t k = kSolid;
            if (i == 0) {
                if (fpo_ && m.is_fluid(0, j)) {
                    k = kFixed;
                    ufixed_[uid(i, j)] =
                        physics::inlet_profile(case_.boundary.speed, case_.fluid.H, (j + 0.5) * dy_);
                }
            } else if (i == W_) {
                if (fpo_ && m.is_fluid(W_ - 1, j)) {
                    k = kOutlet;
                    outlet_faces_.push_back(uid(i, j));
                }
            } else if (m.is_fluid(i - 1, j) && m.is_fluid(i, j)) {
                k = kActive;
            }
            ukind_[uid(i, j)] = k;
        }
    }
    for (int j = 1; j < H_; ++j) {
        for (int i = 0; i < W_; ++i) {
            if (m.is_fluid(i, j - 1) && m.is_fluid(i, j)) vkind_[vid(i, j)] = kActive;
        }
    }

    const double cx = 1.0 / (dx_ * dx_);
    const double cy = 1.0 / (dy_ * dy_);

    // u faces: x neighbors are normal (Dirichlet at their own location),
    // y neighbors are tangential (mirror about the wall or solid interface).
    uface_.clear();
    for (int j = 0; j < H_; ++j) {
        for (int i = 1; i < W_; ++i) {
            if (ukind_[uid(i, j)] != kActive) continue;
            ActiveFace f;
            f.idx = uid(i, j);
            int slot = 0;
            for (int di : {-1, 1}) {
                const int n = uid(i + di, j);
                switch (ukind_[n]) {
                case kActive:
                    f.nb[slot] = n;
                    f.coef[slot++] = cx;
                    f.diag += cx;
                    break;
                case kFixed:
                    f.src += cx * ufixed_[n];
                    f.diag += cx;
                    break;
                case kOutlet:
                    break;  // zero gradient
                default:
                    f.diag += cx;
                    break;
                }
            }
            for (int dj : {-1, 1}) {
                const int jn = j + dj;
                if (jn < 0 || jn >= H_) {
                    const double wall = jn >= H_ ? lid_ : 0.0;
                    f.diag += 2.0 * cy;
                    f.src += 2.0 * cy * wall;
                } else if (ukind_[uid(i, jn)] == kActive) {
                    f.nb[slot] = uid(i, jn);
                    f.coef[slot++] = cy;
                    f.diag += cy;
                } else {
                    f.diag += 2.0 * cy;
                }
            }
            uface_.push_back(f);
        }
    }

    vface_.clear();
    for (int j = 1; j < H_; ++j) {
        for (int i = 0; i < W_; ++i) {
            if (vkind_[vid(i, j)] != kActive) continue;
            ActiveFace f;
            f.idx = vid(i, j);
            int slot = 0;
            for (int di : {-1, 1}) {
                const int in = i + di;
                if (in < 0) {
                    f.diag += 2.0 * cx;  // inlet or wall, v = 0
                } else if (in >= W_) {
                    if (!fpo_) f.diag += 2.0 * cx;  // outlet: zero gradient
                } else if (vkind_[vid(in, j)] == kActive) {
                    f.nb[slot] = vid(in, j);
                    f.coef[slot++] = cx;
                    f.diag += cx;
                } else {
                    f.diag += 2.0 * cx;
                }
            }
            for (int dj : {-1, 1}) {
                const int n = vid(i, j + dj);
                if (vkind_[n] == kActive) {
                    f.nb[slot] = n;
                    f.coef[slot++] = cy;
                }
                f.diag += cy;
            }
            vface_.push_back(f);
        }
    }
}

void Stepper::load_padded(const std::vector<double>& u, const std::vector<double>& v) {
    for (int j = 0; j < H_; ++j) {
        const double* row = &u[static_cast<std::size_t>(j) * (W_ + 1)];
        for (int i = 0; i <= W_; ++i) PU(i, j) = row[i];
        if (fpo_) {
            PU(-1, j) = PU(-2, j) = PU(0, j);
            PU(W_ + 1, j) = PU(W_ + 2, j) = PU(W_, j);
        } else {
            PU(-1, j) = -PU(1, j);
            PU(-2, j) = -PU(2, j);
            PU(W_ + 1, j) = -PU(W_ - 1, j);
            PU(W_ + 2, j) = -PU(W_ - 2, j);
        }
    }
    for (int i = -2; i <= W_ + 2; ++i) {
        PU(i, -1) = -PU(i, 0);
        PU(i, -2) = -PU(i, 1);
        PU(i, H_) = 2.0 * lid_ - PU(i, H_ - 1);
        PU(i, H_ + 1) = 2.0 * lid_ - PU(i, H_ - 2);
    }

    for (int j = 0; j <= H_; ++j) {
        const double* row = &v[static_cast<std::size_t>(j) * W_];
        for (int i = 0; i < W_; ++i) PV(i, j) = row[i];
    }
    for (int i = 0; i < W_; ++i) {
        PV(i, -1) = -PV(i, 1);
        PV(i, -2) = -PV(i, 2);
        PV(i, H_ + 1) = -PV(i, H_ - 1);
        PV(i, H_ + 2) = -PV(i, H_ - 2);
    }
    for (int j = -2; j <= H_ + 2; ++j) {
        PV(-1, j) = -PV(0, j);
        PV(-2, j) = -PV(1, j);
        if (fpo_) {
            PV(W_, j) = PV(W_ + 1, j) = PV(W_ - 1, j);
        } else {
            PV(W_, j) = -PV(W_ - 1, j);
            PV(W_ + 1, j) = -PV(W_ - 2, j);
        }
    }
}

namespace {

// Second-order upwind face value: extrapolate from the upwind node and the
// one behind it.
inline double upwind2(double flux, double up2, double up1, double down1, double down2) {
    return flux > 0.0 ? 1.5 * up1 - 0.5 * up2 : 1.5 * down1 - 0.5 * down2;
}

}  // namespace

void Stepper::convect(std::vector<double>& nu_out, std::vector<double>& nv_out) {
    const double rdx = 1.0 / dx_;
    const double rdy = 1.0 / dy_;
    for (const ActiveFace& f : uface_) {
        const int i = f.idx % (W_ + 1);
        const int j = f.idx / (W_ + 1);
        const double fe = 0.5 * (PU(i, j) + PU(i + 1, j));
        const double fw = 0.5 * (PU(i - 1, j) + PU(i, j));
        const double gn = 0.5 * (PV(i - 1, j + 1) + PV(i, j + 1));
        const double gs = 0.5 * (PV(i - 1, j) + PV(i, j));
        const double pe = upwind2(fe, PU(i - 1, j), PU(i, j), PU(i + 1, j), PU(i + 2, j));
        const double pw = upwind2(fw, PU(i - 2, j), PU(i - 1, j), PU(i, j), PU(i + 1, j));
        const double pn = upwind2(gn, PU(i, j - 1), PU(i, j), PU(i, j + 1), PU(i, j + 2));
        const double ps = upwind2(gs, PU(i, j - 2), PU(i, j - 1), PU(i, j), PU(i, j + 1));
        nu_out[f.idx] = (fe * pe - fw * pw) * rdx + (gn * pn - gs * ps) * rdy;
    }
    for (const ActiveFace& f : vface_) {
        const int i = f.idx % W_;
        const int j = f.idx / W_;
        const double gn = 0.5 * (PV(i, j) + PV(i, j + 1));
        const double gs = 0.5 * (PV(i, j - 1) + PV(i, j));
        const double fe = 0.5 * (PU(i + 1, j - 1) + PU(i + 1, j));
        const double fw = 0.5 * (PU(i, j - 1) + PU(i, j));
        const double pn = upwind2(gn, PV(i, j - 1), PV(i, j), PV(i, j + 1), PV(i, j + 2));
        const double ps = upwind2(gs, PV(i, j - 2), PV(i, j - 1), PV(i, j), PV(i, j + 1));
        const double pe = upwind2(fe, PV(i - 1, j), PV(i, j), PV(i + 1, j), PV(i + 2, j));
        const double pw = upwind2(fw, PV(i - 2, j), PV(i - 1, j), PV(i, j), PV(i + 1, j));
        nv_out[f.idx] = (fe * pe - fw * pw) * rdx + (gn * pn - gs * ps) * rdy;
    }
}

int Stepper::smooth(std::vector<double>& x, const std::vector<ActiveFace>& faces,
                    const std::vector<double>& rhs, double dt) {
    // (1 + a diag) x_f - a sum(coef x_nb) = rhs_f + a src_f,  a = nu dt
    const double a = case_.fluid.nu * dt;
    auto residual = [&](double& scale) {
        double res = 0.0;
        scale = 0.0;
        for (const ActiveFace& f : faces) {
            double s = rhs[f.idx] + a * f.src;
            scale += std::abs(s);
            for (int k = 0; k < 4 && f.nb[k] >= 0; ++k) s += a * f.coef[k] * x[f.nb[k]];
            res += std::abs(s - (1.0 + a * f.diag) * x[f.idx]);
        }
        return res;
    };
    auto relax = [&](const ActiveFace& f) {
        double s = rhs[f.idx] + a * f.src;
        for (int k = 0; k < 4 && f.nb[k] >= 0; ++k) s += a * f.coef[k] * x[f.nb[k]];
        x[f.idx] = s / (1.0 + a * f.diag);
    };

    double scale = 0.0;
    double res = residual(scale);
    int sweeps = 0;
    while (res > case_.solver.u_tol * scale && sweeps < case_.solver.max_sgs_sweeps) {
        for (const ActiveFace& f : faces) relax(f);
        for (auto it = faces.rbegin(); it != faces.rend(); ++it) relax(*it);
        ++sweeps;
        res = residual(scale);
    }
    return sweeps;
}

double Stepper::stable_dt(const FlowState& s) const {
    double speed = 0.0;
    for (int j = 0; j < H_; ++j) {
        for (int i = 0; i < W_; ++i) {
            const double uc = 0.5 * (s.U(i, j) + s.U(i + 1, j));
            const double vc = 0.5 * (s.V(i, j) + s.V(i, j + 1));
            speed = std::max(speed, std::abs(uc) + std::abs(vc));
        }
    }
    if (!std::isfinite(speed)) throw SimulationDiverged("non-finite velocity");
    const double ref = case_.u_ref();
    if (ref > 0.0 && speed > 1e3 * ref) {
        throw SimulationDiverged("velocity exceeded 1000 x the reference speed");
    }
    const double vmax = std::max(speed, ref);
    if (vmax <= 0.0) return std::numeric_limits<double>::infinity();
    return case_.solver.cfl * std::min(dx_, dy_) / vmax;
}

StepStats Stepper::advance(FlowState& s, double dt) {
    StepStats st;
    const std::size_t nu = s.u.size();
    const std::size_t nv = s.v.size();
    nu_.assign(nu, 0.0);
    nv_.assign(nv, 0.0);
    u0_ = s.u;
    v0_ = s.v;

    // SSP-RK3 for the explicit convective part; only active faces move.
    std::vector<double>& ua = rhs_u_;
    std::vector<double>& va = rhs_v_;
    ua = u0_;
    va = v0_;
    load_padded(u0_, v0_);
    convect(nu_, nv_);
    for (const ActiveFace& f : uface_) ua[f.idx] = u0_[f.idx] - dt * nu_[f.idx];
    for (const ActiveFace& f : vface_) va[f.idx] = v0_[f.idx] - dt * nv_[f.idx];

    load_padded(ua, va);
    convect(nu_, nv_);
    for (const ActiveFace& f : uface_) {
        ua[f.idx] = 0.75 * u0_[f.idx] + 0.25 * (ua[f.idx] - dt * nu_[f.idx]);
    }
    for (const ActiveFace& f : vface_) {
        va[f.idx] = 0.75 * v0_[f.idx] + 0.25 * (va[f.idx] - dt * nv_[f.idx]);
    }

    load_padded(ua, va);
    convect(nu_, nv_);
    for (const ActiveFace& f : uface_) {
        ua[f.idx] = (u0_[f.idx] + 2.0 * (ua[f.idx] - dt * nu_[f.idx])) / 3.0;
    }
    for (const ActiveFace& f : vface_) {
        va[f.idx] = (v0_[f.idx] + 2.0 * (va[f.idx] - dt * nv_[f.idx])) / 3.0;
    }

    // Old pressure gradient, then backward-Euler diffusion.
    for (const ActiveFace& f : uface_) {
        const int i = f.idx % (W_ + 1);
        const int j = f.idx / (W_ + 1);
        ua[f.idx] -= dt * (s.P(i, j) - s.P(i - 1, j)) / dx_;
        s.u[f.idx] = ua[f.idx];
    }
    for (const ActiveFace& f : vface_) {
        const int i = f.idx % W_;
        const int j = f.idx / W_;
        va[f.idx] -= dt * (s.P(i, j) - s.P(i, j - 1)) / dy_;
        s.v[f.idx] = va[f.idx];
    }
    st.sgs_sweeps += smooth(s.u, uface_, ua, dt);
    st.sgs_sweeps += smooth(s.v, vface_, va, dt);
    for (int idx : outlet_faces_) s.u[idx] = s.u[idx - 1];

    // Pressure-increment projection.
    // The divergence bound is scaled by u_ref; fall back to the field speed when it is zero.
    double vmax = case_.u_ref();
    if (vmax <= 0.0) {
        for (double x : s.u) vmax = std::max(vmax, std::abs(x));
        for (double x : s.v) vmax = std::max(vmax, std::abs(x));
    }
    const double hmin = std::min(dx_, dy_);
    for (int j = 0; j < H_; ++j) {
        for (int i = 0; i < W_; ++i) {
            const int c = pressure_.cell_index(i, j);
            if (c < 0) continue;
            b_[c] = ((s.U(i + 1, j) - s.U(i, j)) / dx_ + (s.V(i, j + 1) - s.V(i, j)) / dy_) / dt;
        }
    }
    if (pressure_.singular()) PressureSolver::remove_mean(b_);

    PoissonOptions opt;
    opt.tol = case_.solver.p_tol;
    opt.rel_tol = case_.solver.p_rel_tol;
    opt.abs_inf_tol = 0.5 * case_.solver.div_tol * vmax / (dt * hmin);
    opt.max_iters = case_.solver.max_cg_iters;
    const PoissonStats ps = pressure_.solve(b_, phi_, opt);
    st.cg_iterations = ps.iterations;
    if (pressure_.singular()) PressureSolver::remove_mean(phi_);

    auto phi_at = [&](int i, int j) { return phi_[pressure_.cell_index(i, j)]; };
    for (const ActiveFace& f : uface_) {
        const int i = f.idx % (W_ + 1);
        const int j = f.idx / (W_ + 1);
        s.u[f.idx] -= dt * (phi_at(i, j) - phi_at(i - 1, j)) / dx_;
    }
    for (int idx : outlet_faces_) {
        const int j = idx / (W_ + 1);
        s.u[idx] += 2.0 * dt * phi_at(W_ - 1, j) / dx_;
    }
    for (const ActiveFace& f : vface_) {
        const int i = f.idx % W_;
        const int j = f.idx / W_;
        s.v[f.idx] -= dt * (phi_at(i, j) - phi_at(i, j - 1)) / dy_;
    }
    for (int j = 0; j < H_; ++j) {
        for (int i = 0; i < W_; ++i) {
            const int c = pressure_.cell_index(i, j);
            if (c >= 0) s.P(i, j) += phi_[c];
        }
    }
    s.t += dt;
    return st;
}

FlowState step(const FlowState& state, const CaseSetup& c, double dt) {
    Stepper stepper(c);
    FlowState next = state;
    stepper.advance(next, dt);
    return next;
}

// ---------------------------------------------------------------------------
// Diagnostics

std::vector<double> divergence(const FlowState& s, const BinaryMask& mask) {
    const double dx = mask.dx();
    const double dy = mask.dy();
    std::vector<double> div(static_cast<std::size_t>(s.W) * s.H, 0.0);
    for (int j = 0; j < s.H; ++j) {
        for (int i = 0; i < s.W; ++i) {
            if (!mask.is_fluid(i, j)) continue;
            div[static_cast<std::size_t>(j) * s.W + i] =
                (s.U(i + 1, j) - s.U(i, j)) / dx + (s.V(i, j + 1) - s.V(i, j)) / dy;
        }
    }
    return div;
}

double max_scaled_divergence(const FlowState& s, const BinaryMask& mask, double u_ref) {
    const auto div = divergence(s, mask);
    double m = 0.0;
    for (double d : div) m = std::max(m, std::abs(d));
    return m * std::min(mask.dx(), mask.dy()) / u_ref;
}

double kinetic_energy(const FlowState& s, const BinaryMask& mask) {
    double sum = 0.0;
    for (double x : s.u) sum += x * x;
    for (double x : s.v) sum += x * x;
    return 0.5 * mask.dx() * mask.dy() * sum;
}

void project_divergence_free(FlowState& s, const CaseSetup& c) {
    const auto& m = c.mask;
    const int W = m.dims.w;
    const int H = m.dims.h;
    const double dx = m.dx();
    const double dy = m.dy();
    const bool fpo = c.kind == FlowKind::FPO;
    const FlowState rest = initial_state(c);

    // Zero every face that is not free to move, restore prescribed values.
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i <= W; ++i) {
            const bool interior = i > 0 && i < W && m.is_fluid(i - 1, j) && m.is_fluid(i, j);
            const bool outlet = fpo && i == W && m.is_fluid(W - 1, j);
            if (!interior && !outlet) s.U(i, j) = rest.U(i, j);
        }
    }
    for (int j = 0; j <= H; ++j) {
        for (int i = 0; i < W; ++i) {
            const bool interior = j > 0 && j < H && m.is_fluid(i, j - 1) && m.is_fluid(i, j);
            if (!interior) s.V(i, j) = 0.0;
        }
    }

    PressureSolver ps(m, fpo);
    std::vector<double> b(ps.size()), phi(ps.size(), 0.0);
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            const int k = ps.cell_index(i, j);
            if (k >= 0) b[k] = (s.U(i + 1, j) - s.U(i, j)) / dx + (s.V(i, j + 1) - s.V(i, j)) / dy;
        }
    }
    if (ps.singular()) PressureSolver::remove_mean(b);
    PoissonOptions opt;
    opt.tol = 1e-13;
    opt.max_iters = 20000;
    ps.solve(b, phi, opt);

    auto at = [&](int i, int j) { return phi[ps.cell_index(i, j)]; };
    for (int j = 0; j < H; ++j) {
        for (int i = 1; i < W; ++i) {
            if (m.is_fluid(i - 1, j) && m.is_fluid(i, j)) s.U(i, j) -= (at(i, j) - at(i - 1, j)) / dx;
        }
        if (fpo && m.is_fluid(W - 1, j)) s.U(W, j) += 2.0 * at(W - 1, j) / dx;
    }
    for (int j = 1; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            if (m.is_fluid(i, j - 1) && m.is_fluid(i, j)) s.V(i, j) -= (at(i, j) - at(i, j - 1)) / dy;
        }
    }
}

// ---------------------------------------------------------------------------
// Runs

namespace {

void write_frame(Trajectory& traj, int t, const FlowState& s, const CaseSetup& c) {
    const auto& m = c.mask;
    double mean = 0.0;
    std::size_t n = 0;
    for (int j = 0; j < s.H; ++j) {
        for (int i = 0; i < s.W; ++i) {
            if (m.is_fluid(i, j)) {
                mean += s.P(i, j);
                ++n;
            }
        }
    }
    mean /= static_cast<double>(n);
    const float re_hat = static_cast<float>(c.boundary.re / kReNormalization);
    for (int j = 0; j < s.H; ++j) {
        for (int i = 0; i < s.W; ++i) {
            const bool fluid = m.is_fluid(i, j);
            traj.at(t, j, i, kU) = fluid ? static_cast<float>(0.5 * (s.U(i, j) + s.U(i + 1, j))) : 0.0f;
            traj.at(t, j, i, kV) = fluid ? static_cast<float>(0.5 * (s.V(i, j) + s.V(i, j + 1))) : 0.0f;
            traj.at(t, j, i, kP) = fluid ? static_cast<float>(s.P(i, j) - mean) : 0.0f;
            traj.at(t, j, i, kReHat) = re_hat;
            traj.at(t, j, i, kMask) = fluid ? 1.0f : 0.0f;
            traj.at(t, j, i, kSdf) = static_cast<float>(c.sdf.at(i, j));
        }
    }
}

}  // namespace

RunResult run_simulation(const CaseSetup& c, const FrameObserver& observer) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    RunResult result;
    cost::CostRecord& rec = result.cost;
    rec.sim_id = c.labels.sim_id;
    rec.axis = c.labels.axis;
    rec.tier = c.labels.tier;
    rec.obstacle_count = static_cast<int>(c.obstacles.size());
    rec.re = c.boundary.re;
    rec.host = cost::host_tag();

    const int frames = c.schedule.n_frames;
    Trajectory traj(frames, c.mask.dims.h, c.mask.dims.w);
    traj.meta.sim_id = c.labels.sim_id;
    traj.meta.seed = c.seed;
    traj.meta.re = c.boundary.re;
    traj.meta.kind = c.kind;
    traj.meta.t_end = c.schedule.t_end;
    traj.meta.write_interval = c.schedule.write_interval;
    traj.meta.gamma = c.schedule.gamma;
    traj.meta.fixed_schedule = c.schedule.fixed;
    traj.meta.domain = c.mask.domain;

    auto elapsed = [&] {
        return std::max(std::chrono::duration<double>(clock::now() - start).count(), 1e-9);
    };

    try {
        Stepper stepper(c);
        FlowState s = initial_state(c);
        for (int k = 1; k <= frames; ++k) {
            const double target = k * c.schedule.write_interval;
            while (target - s.t > 1e-9 * target) {
                double dt = stepper.stable_dt(s);
                const double remaining = target - s.t;
                if (!std::isfinite(dt) || dt >= remaining) {
                    dt = remaining;
                } else if (2.0 * dt > remaining) {
                    dt = 0.5 * remaining;
                }
                const StepStats st = stepper.advance(s, dt);
                rec.steps += 1;
                rec.cg_iters_total += st.cg_iterations;
                if (rec.steps > c.solver.max_steps) {
                    throw SimulationDiverged("step limit exceeded");
                }
            }
            s.t = target;
            write_frame(traj, k - 1, s, c);
            result.frame_divergence.push_back(
                c.u_ref() > 0.0 ? max_scaled_divergence(s, c.mask, c.u_ref()) : 0.0);
            if (observer) observer(k - 1, s);
        }
    } catch (const Error& e) {
        rec.wall_seconds = elapsed();
        throw RunAborted(e.what(), rec);
    }
    rec.wall_seconds = elapsed();

    if (!(c.export_grid == c.mask.dims)) {
        result.trajectory = trajio::resample_trajectory(traj, c.export_grid);
    } else {
        result.trajectory = std::move(traj);
    }
    return result;
}

}  // namespace nspregen::solver
