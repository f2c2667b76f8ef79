#pragma once

#include <iosfwd>
#include <vector>

#include "nspregen/config.hpp"
#include "nspregen/cost.hpp"
#include "nspregen/trajectory.hpp"

namespace nspregen::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Entry point of the `nspregen` executable.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

/// per_cell_n simulations per tier of `axis` at the configured grid. Within
/// an index the same seed is used for every tier, so tiers of the geometry
/// axis share their Reynolds numbers. Failed runs are reported on `log`
/// and left out.
std::vector<cost::CostRecord> profile_axis(const config::RunConfig& cfg, geometry::Axis axis, int per_cell_n,
                                           int workers, std::ostream* log = nullptr);

/// dv/dx - du/dy at cell centers of one frame; central differences inside,
/// one-sided at the domain edges.
std::vector<double> vorticity(const Trajectory& traj, int frame);

}  // namespace nspregen::cli
