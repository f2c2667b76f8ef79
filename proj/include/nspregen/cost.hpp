#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nspregen/geometry.hpp"

namespace nspregen::cost {

using geometry::Axis;
using geometry::Tier;

struct CostRecord {
    std::uint64_t sim_id = 0;
    Axis axis = Axis::Geometry;
    Tier tier = Tier::Easy;
    int obstacle_count = 0;
    double re = 0.0;
    double wall_seconds = 0.0;
    std::int64_t steps = 0;
    std::int64_t cg_iters_total = 0;
    std::string host;

    friend bool operator==(const CostRecord&, const CostRecord&) = default;
};

struct CellStats {
    double mean_seconds = 0.0;
    double std_seconds = 0.0;  ///< sample standard deviation, 0 for n = 1
    int n = 0;
};

struct CostTable {
    std::map<std::pair<Axis, Tier>, CellStats> cells;

    const CellStats* find(Axis a, Tier t) const;
};

/// Seconds per simulation for each tier of one axis.
struct CostModel {
    Axis axis = Axis::Geometry;
    std::map<Tier, double> seconds;

    double at(Tier t) const;
};

/// Group-by (axis, tier) mean/std/count. Throws InvalidArgument on empty input.
CostTable aggregate_costs(const std::vector<CostRecord>& records);

/// c(tier) = cell mean; MissingTier unless all three tiers are populated.
CostModel fit_cost_model(const CostTable& table, Axis axis);

struct MonotonicityReport {
    Axis axis = Axis::Geometry;
    bool monotone = false;
    double easy = 0.0;
    double medium = 0.0;
    double hard = 0.0;
    double ratio_medium_easy = 0.0;
    double ratio_hard_medium = 0.0;
    double ratio_hard_easy = 0.0;
    double margin_medium_easy = 0.0;  ///< medium - easy, seconds
    double margin_hard_medium = 0.0;
};

/// Strict easy < medium < hard check on cell means. Throws MissingTier.
MonotonicityReport check_monotonicity(const CostTable& table, Axis axis);

std::string host_tag();

// Cost CSV: sim_id,axis,tier,obstacles,re,wall_seconds,steps,cg_iters,host
void write_cost_csv(std::ostream& os, const std::vector<CostRecord>& records, bool header = true);
void write_cost_csv(const std::filesystem::path& path, const std::vector<CostRecord>& records);
std::vector<CostRecord> read_cost_csv(std::istream& is);
std::vector<CostRecord> read_cost_csv(const std::filesystem::path& path);

/// Cost table CSV: axis,tier,mean_seconds,std_seconds,n
void write_table_csv(std::ostream& os, const CostTable& table);
CostTable read_table_csv(std::istream& is);

}  // namespace nspregen::cost
