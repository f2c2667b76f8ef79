#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nspregen/cost.hpp"
#include "nspregen/geometry.hpp"
#include "nspregen/physics.hpp"
#include "nspregen/solver.hpp"

namespace nspregen::planner {

using geometry::Axis;
using geometry::Tier;

inline constexpr int kManifestVersion = 1;
inline constexpr int kHeldOutCount = 100;
inline constexpr int kHardSeedCount = 200;

struct ObstacleRange {
    int min = 0;
    int max = 0;
    double size_lo = 0.15;
    double size_hi = 0.30;
    friend bool operator==(const ObstacleRange&, const ObstacleRange&) = default;
};

/// Tier definitions per axis. The geometry axis draws Re from `geometry_re`
/// for every tier; the physics axis uses no obstacles.
struct TierCatalog {
    physics::ReBand re_easy = physics::bands::kEasy;
    physics::ReBand re_medium = physics::bands::kMedium;
    physics::ReBand re_hard = physics::bands::kHard;
    physics::ReBand geometry_re = physics::bands::kEasy;
    ObstacleRange obs_easy{0, 0};
    ObstacleRange obs_medium{1, 1};
    ObstacleRange obs_hard{2, 10};

    const physics::ReBand& re(Tier t) const;
    const ObstacleRange& obstacles(Tier t) const;
};

struct TierEntry {
    Tier tier = Tier::Easy;
    int count = 0;
    physics::ReBand re_band;
    ObstacleRange obstacles;
    std::uint64_t base_seed = 0;
    friend bool operator==(const TierEntry&, const TierEntry&) = default;
};

/// Band and obstacle range of `tier` on `axis`, with count 0.
TierEntry tier_spec(Axis axis, Tier tier, const TierCatalog& catalog = {});

struct HeldOut {
    int count = kHeldOutCount;
    std::uint64_t seed = 0;
    TierEntry spec;  ///< drawn from the hard tier; `spec.count` is unused
    friend bool operator==(const HeldOut&, const HeldOut&) = default;
};

struct FileRef {
    std::string path;  ///< relative to the manifest directory
    Tier tier = Tier::Easy;
    int index = 0;
    bool held_out = false;
    std::uint64_t seed = 0;
    double re = 0.0;
    int obstacles = 0;
    std::string status;  ///< "ok", "existing" or "failed: <reason>"
    std::optional<cost::CostRecord> cost;
    friend bool operator==(const FileRef&, const FileRef&) = default;
};

struct DatasetManifest {
    int version = kManifestVersion;
    std::string name;
    Axis axis = Axis::Physics;
    physics::FlowKind kind = physics::FlowKind::FPO;
    std::vector<TierEntry> entries;
    HeldOut held_out;
    std::vector<FileRef> files;

    int total_count() const;
    int count(Tier t) const;
    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

nlohmann::json to_json(const DatasetManifest& m);
/// Throws SchemaError naming the offending field.
DatasetManifest manifest_from_json(const nlohmann::json& j);
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// round-half-up of alpha * total_n.
int hard_count(int total_n, double alpha);

std::vector<double> default_alpha_grid();

/// One manifest per alpha; the held-out set is shared across the sweep.
std::vector<DatasetManifest> alpha_sweep_manifest(int total_n, const std::vector<double>& alphas,
                                                  Tier lower_tier, Tier hard_tier, Axis axis,
                                                  std::uint64_t base_seed,
                                                  const TierCatalog& catalog = {},
                                                  physics::FlowKind kind = physics::FlowKind::FPO);

struct BudgetPlan {
    int n_hard_seed = kHardSeedCount;
    Tier augmentation_tier = Tier::Easy;
    std::vector<int> grid;
    double budget_seconds = 0.0;
    double seed_cost = 0.0;      ///< n_hard_seed * c(hard)
    double per_example = 0.0;    ///< c(augmentation tier)
    std::vector<int> feasible_counts;
    /// "budget" when some grid value is excluded, "grid" when the grid runs out first.
    std::string binding;
};

/// 1, 2, 4, ..., 2048, 3200.
std::vector<int> default_augmentation_grid();

/// Keeps the grid counts g with n_hard_seed c(hard) + g c(tier) <= budget.
/// Throws InfeasibleSeed when the budget does not cover the hard seed.
BudgetPlan budget_augmentation_plan(const cost::CostModel& model, double budget_seconds, Tier tier,
                                    const std::vector<int>& grid, int n_hard_seed = kHardSeedCount);

/// Hard seed plus `count` examples of the plan's tier.
DatasetManifest budget_manifest(const BudgetPlan& plan, int count, Axis axis, std::uint64_t base_seed,
                                const TierCatalog& catalog = {},
                                physics::FlowKind kind = physics::FlowKind::FPO);

/// Sum of count * c(tier) over the manifest entries.
double total_cost(const DatasetManifest& m, const cost::CostModel& model);

double compute_savings_ratio(const DatasetManifest& reference, const DatasetManifest& mixed,
                             const cost::CostModel& model);

/// All-hard manifest with the same total count as `m`.
DatasetManifest all_hard_reference(const DatasetManifest& m, const TierCatalog& catalog = {});

/// Throws SchemaError if a held-out seed coincides with a training seed.
void check_held_out_disjoint(const std::vector<DatasetManifest>& family);

/// Seed of training example `index` of an entry, or of a held-out example.
std::uint64_t example_seed(const TierEntry& e, int index);
std::uint64_t held_out_seed(const HeldOut& h, int index);

// ---------------------------------------------------------------------------
// Generation

struct GenerationSettings {
    physics::FluidParams fluid;
    solver::SolverParams solver;
    geometry::GridDims export_grid{128, 128};
    geometry::SamplingParams sampling;
};

/// Concrete case drawn for one example.
struct CaseSpec {
    std::uint64_t seed = 0;
    Axis axis = Axis::Physics;
    Tier tier = Tier::Easy;
    double re = 0.0;
    geometry::ObstacleSet obstacles;
};

/// Draws Re and the obstacle layout from `seed`. Layouts that leave the fluid
/// disconnected on the solver grid are redrawn from a derived stream.
CaseSpec draw_case(const TierEntry& e, Axis axis, std::uint64_t seed, const GenerationSettings& g);

solver::CaseSetup setup_case(const CaseSpec& spec, physics::FlowKind kind, const GenerationSettings& g);

struct MaterializeOptions {
    int workers = 1;
    bool include_held_out = false;
    /// Called from the writer thread after each example finishes.
    std::function<void(const FileRef&)> on_file;
};

struct MaterializeResult {
    DatasetManifest manifest;  ///< with file references
    std::filesystem::path manifest_path;
    int simulated = 0;
    int skipped = 0;
    int failed = 0;
    double wall_seconds = 0.0;
    std::vector<cost::CostRecord> costs;
};

/// Simulates every example into out_dir/<name>/<tier>_<index>.nst and writes
/// out_dir/<name>/manifest.json. Existing valid files are kept. Per-file
/// failures are recorded and the batch continues.
MaterializeResult materialize_manifest(const DatasetManifest& m, const std::filesystem::path& out_dir,
                                       const GenerationSettings& g, const MaterializeOptions& opt = {});

}  // namespace nspregen::planner
