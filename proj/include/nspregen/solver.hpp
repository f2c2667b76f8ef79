#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nspregen/cost.hpp"
#include "nspregen/errors.hpp"
#include "nspregen/geometry.hpp"
#include "nspregen/physics.hpp"
#include "nspregen/poisson.hpp"
#include "nspregen/trajectory.hpp"

namespace nspregen::solver {

using geometry::BinaryMask;
using geometry::GridDims;

struct SolverParams {
    GridDims grid{128, 128};
    double cfl = 0.5;
    double p_tol = 1e-6;       ///< pressure residual tolerance, relative to |rhs|
    double p_rel_tol = 0.05;   ///< pressure residual reduction per step
    double u_tol = 1e-5;       ///< momentum smoother tolerance (normalized L1 residual)
    int max_cg_iters = 5000;
    int max_sgs_sweeps = 200;
    double div_tol = 1e-6;     ///< bound on max |div u| dx / u_ref after each step
    std::int64_t max_steps = 5'000'000;

    void validate() const;
};

/// Staggered (MAC) velocity and cell-centered kinematic pressure.
///
/// u lives on vertical faces, (W+1) x H, index j*(W+1)+i with face i at x = i dx.
/// v lives on horizontal faces, W x (H+1), index j*W+i with face j at y = j dy.
struct FlowState {
    int W = 0;
    int H = 0;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> p;
    double t = 0.0;

    FlowState() = default;
    FlowState(int w, int h)
        : W(w), H(h),
          u(static_cast<std::size_t>(w + 1) * h, 0.0),
          v(static_cast<std::size_t>(w) * (h + 1), 0.0),
          p(static_cast<std::size_t>(w) * h, 0.0) {}

    double& U(int i, int j) noexcept { return u[static_cast<std::size_t>(j) * (W + 1) + i]; }
    double U(int i, int j) const noexcept { return u[static_cast<std::size_t>(j) * (W + 1) + i]; }
    double& V(int i, int j) noexcept { return v[static_cast<std::size_t>(j) * W + i]; }
    double V(int i, int j) const noexcept { return v[static_cast<std::size_t>(j) * W + i]; }
    double& P(int i, int j) noexcept { return p[static_cast<std::size_t>(j) * W + i]; }
    double P(int i, int j) const noexcept { return p[static_cast<std::size_t>(j) * W + i]; }
};

struct CaseLabels {
    std::uint64_t sim_id = 0;
    geometry::Axis axis = geometry::Axis::Geometry;
    geometry::Tier tier = geometry::Tier::Easy;
};

struct CaseSetup {
    physics::FlowKind kind = physics::FlowKind::FPO;
    geometry::ObstacleSet obstacles;
    BinaryMask mask;
    geometry::SdfField sdf;
    physics::BoundarySetup boundary;
    physics::Schedule schedule;
    physics::FluidParams fluid;
    SolverParams solver;
    GridDims export_grid{128, 128};
    std::uint64_t seed = 0;
    CaseLabels labels;

    /// Characteristic speed: peak inlet speed or lid speed.
    double u_ref() const noexcept { return boundary.speed; }
};

/// Rasterizes the geometry, computes the schedule and validates the domain.
///
/// Throws DisconnectedDomain when the fluid cells are not one 4-connected
/// region, or (FPO) when the region does not reach both inlet and outlet.
/// The export grid defaults to the solver grid.
CaseSetup build_case(const geometry::ObstacleSet& obs, const physics::BoundarySetup& boundary,
                     const physics::FluidParams& fluid, const SolverParams& params);

/// Interior at rest, boundary faces at their prescribed values.
FlowState initial_state(const CaseSetup& c);

struct StepStats {
    int cg_iterations = 0;
    int sgs_sweeps = 0;
};

/// Incremental pressure-projection stepper bound to one case.
///
/// Per step: SSP-RK3 sub-integration of second-order upwind convection,
/// backward-Euler diffusion with the old pressure gradient (symmetric
/// Gauss-Seidel), then a DIC-PCG pressure-increment projection. Solid faces
/// are held at zero; no-slip tangential closure mirrors across the wall.
class Stepper {
public:
    explicit Stepper(const CaseSetup& c);

    /// Advances `s` by `dt` in place.
    StepStats advance(FlowState& s, double dt);

    /// cfl * min(dx, dy) / max(max |u_c| + |v_c|, u_ref); +inf when both vanish.
    double stable_dt(const FlowState& s) const;

    const CaseSetup& case_setup() const noexcept { return case_; }

private:
    enum FaceKind : std::uint8_t { kSolid = 0, kActive, kFixed, kOutlet };

    struct ActiveFace {
        int idx = 0;
        double diag = 0.0;  ///< sum of Laplacian weights on the face itself
        double src = 0.0;   ///< Laplacian contribution of prescribed wall values
        int nb[4] = {-1, -1, -1, -1};
        double coef[4] = {0.0, 0.0, 0.0, 0.0};
    };

    void build_stencils();
    void load_padded(const std::vector<double>& u, const std::vector<double>& v);
    void convect(std::vector<double>& nu_out, std::vector<double>& nv_out);
    int smooth(std::vector<double>& field, const std::vector<ActiveFace>& faces,
               const std::vector<double>& rhs, double dt);

    double& PU(int i, int j) noexcept { return pu_[static_cast<std::size_t>(j + 2) * (W_ + 5) + (i + 2)]; }
    double& PV(int i, int j) noexcept { return pv_[static_cast<std::size_t>(j + 2) * (W_ + 4) + (i + 2)]; }

    CaseSetup case_;
    int W_ = 0;
    int H_ = 0;
    double dx_ = 0.0;
    double dy_ = 0.0;
    double lid_ = 0.0;
    bool fpo_ = true;

    std::vector<std::uint8_t> ukind_, vkind_;
    std::vector<double> ufixed_;
    std::vector<ActiveFace> uface_, vface_;
    std::vector<int> outlet_faces_;

    PressureSolver pressure_;
    std::vector<double> phi_;  ///< last pressure increment, warm start
    std::vector<double> pu_, pv_;
    std::vector<double> nu_, nv_, u0_, v0_, rhs_u_, rhs_v_, b_;
};

/// Functional single step; builds a temporary Stepper.
FlowState step(const FlowState& state, const CaseSetup& c, double dt);

/// Staggered divergence per cell, zero on solid cells.
std::vector<double> divergence(const FlowState& s, const BinaryMask& mask);

/// max over fluid cells of |div u| * min(dx, dy) / u_ref.
double max_scaled_divergence(const FlowState& s, const BinaryMask& mask, double u_ref);

/// 0.5 dx dy (sum u^2 + sum v^2) over all faces.
double kinetic_energy(const FlowState& s, const BinaryMask& mask);

/// Projects an arbitrary face field onto the discretely divergence-free
/// subspace of the case (walls and solid faces zeroed first).
void project_divergence_free(FlowState& s, const CaseSetup& c);

struct RunResult {
    Trajectory trajectory;
    cost::CostRecord cost;
    std::vector<double> frame_divergence;  ///< max scaled divergence per frame
};

/// Called after each output frame with its index (0-based) and the face state.
using FrameObserver = std::function<void(int, const FlowState&)>;

/// Raised when a run aborts; carries the cost accumulated so far.
class RunAborted : public SimulationDiverged {
public:
    RunAborted(const std::string& what, cost::CostRecord partial)
        : SimulationDiverged(what), partial_(std::move(partial)) {}
    const cost::CostRecord& partial() const noexcept { return partial_; }

private:
    cost::CostRecord partial_;
};

/// Integrates from rest to the scheduled end time and samples 20 frames.
///
/// Time steps follow the CFL rule and are shortened so every write time is
/// hit exactly. Frames carry cell-centered (u, v, p, re_hat, mask, sdf) with
/// p shifted to zero mean over fluid cells, resampled to `export_grid`.
RunResult run_simulation(const CaseSetup& c, const FrameObserver& observer = {});

}  // namespace nspregen::solver
