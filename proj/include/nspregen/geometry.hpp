#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nspregen::geometry {

/// Axis-aligned rectangle, lower-left corner plus extent, in meters.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    bool contains(double px, double py) const noexcept {
        return px > x && px < x + w && py > y && py < y + h;
    }
    friend bool operator==(const Rect&, const Rect&) = default;
};

/// Euclidean distance between two rectangles (0 when they touch or overlap).
double separation(const Rect& a, const Rect& b) noexcept;

struct Extent {
    double lx = 2.0;
    double ly = 2.0;
    friend bool operator==(const Extent&, const Extent&) = default;
};

struct ObstacleSet {
    std::vector<Rect> obstacles;
    std::uint64_t seed = 0;
    Extent domain;

    std::size_t size() const noexcept { return obstacles.size(); }
    friend bool operator==(const ObstacleSet&, const ObstacleSet&) = default;
};

struct GridDims {
    int h = 128;  ///< rows (y direction)
    int w = 128;  ///< columns (x direction)
    friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Cell-centered fluid/solid flags. Row 0 is the bottom row (y ascending).
struct BinaryMask {
    GridDims dims;
    Extent domain;
    std::vector<std::uint8_t> fluid;  ///< 1 = fluid, 0 = solid, size h*w

    double dx() const noexcept { return domain.lx / dims.w; }
    double dy() const noexcept { return domain.ly / dims.h; }
    bool is_fluid(int i, int j) const noexcept {
        return fluid[static_cast<std::size_t>(j) * dims.w + i] != 0;
    }
    std::size_t fluid_count() const noexcept;
    std::size_t solid_count() const noexcept { return fluid.size() - fluid_count(); }

    static BinaryMask all_fluid(GridDims dims, Extent domain);
};

struct SdfField {
    GridDims dims;
    std::vector<double> values;  ///< meters, row-major like BinaryMask

    double at(int i, int j) const noexcept {
        return values[static_cast<std::size_t>(j) * dims.w + i];
    }
};

enum class Tier { Easy, Medium, Hard };
enum class Axis { Geometry, Physics, Combined };

struct DifficultyTier {
    Tier tier = Tier::Easy;
    Axis axis = Axis::Geometry;
    friend bool operator==(const DifficultyTier&, const DifficultyTier&) = default;
};

std::string_view to_string(Tier t) noexcept;
std::string_view to_string(Axis a) noexcept;
Tier parse_tier(std::string_view s);
Axis parse_axis(std::string_view s);

struct SamplingParams {
    Extent domain;
    double size_lo = 0.15;
    double size_hi = 0.30;
    double margin_min = 0.1;
    double gap_min = 0.05;
    bool squares = true;
    int max_attempts = 10000;
};

/// Rejection-samples `count` non-overlapping obstacles.
///
/// Each candidate is drawn uniformly inside the margin box; a candidate
/// closer than `gap_min` to an accepted rectangle is rejected. Throws
/// PlacementExhausted once `max_attempts` rejections have accumulated.
ObstacleSet sample_obstacles(int count, const SamplingParams& params, std::uint64_t seed);

/// Cell is solid iff its center lies strictly inside some obstacle.
BinaryMask rasterize_mask(const ObstacleSet& obs, GridDims dims);

/// Signed distance to obstacle interfaces, positive in fluid.
///
/// Built from exact squared Euclidean distance transforms between cell
/// centers, shifted by half a cell so the zero level sits on the staircase
/// interface. An obstacle-free mask yields the domain diagonal everywhere.
/// Throws AllSolid when the mask has no fluid cell.
SdfField compute_sdf(const BinaryMask& mask);

/// Exact 2-D squared EDT: squared distance from each cell center to the
/// nearest cell center where `feature` is set. Infinity when no feature.
std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                               GridDims dims, double dx, double dy);

DifficultyTier classify_geometry_difficulty(int obstacle_count);

/// True when the fluid cells form a single 4-connected region.
bool fluid_connected(const BinaryMask& mask);

/// Labels 4-connected fluid components; solid cells get -1. Returns the count.
int label_fluid_components(const BinaryMask& mask, std::vector<int>& labels);

}  // namespace nspregen::geometry
