#include "nspregen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nspregen/errors.hpp"
#include "nspregen/rng.hpp"

namespace nspregen::geometry {

double separation(const Rect& a, const Rect& b) noexcept {
    const double gx = std::max({0.0, a.x - (b.x + b.w), b.x - (a.x + a.w)});
    const double gy = std::max({0.0, a.y - (b.y + b.h), b.y - (a.y + a.h)});
    return std::hypot(gx, gy);
}

std::size_t BinaryMask::fluid_count() const noexcept {
    return static_cast<std::size_t>(std::count(fluid.begin(), fluid.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::all_fluid(GridDims dims, Extent domain) {
    BinaryMask m;
    m.dims = dims;
    m.domain = domain;
    m.fluid.assign(static_cast<std::size_t>(dims.h) * dims.w, 1);
    return m;
}

std::string_view to_string(Tier t) noexcept {
    switch (t) {
    case Tier::Easy: return "easy";
    case Tier::Medium: return "medium";
    case Tier::Hard: return "hard";
    }
    return "?";
}

std::string_view to_string(Axis a) noexcept {
    switch (a) {
    case Axis::Geometry: return "geometry";
    case Axis::Physics: return "physics";
    case Axis::Combined: return "combined";
    }
    return "?";
}

Tier parse_tier(std::string_view s) {
    if (s == "easy") return Tier::Easy;
    if (s == "medium") return Tier::Medium;
    if (s == "hard") return Tier::Hard;
    throw InvalidArgument("unknown tier '" + std::string(s) + "'");
}

Axis parse_axis(std::string_view s) {
    if (s == "geometry") return Axis::Geometry;
    if (s == "physics") return Axis::Physics;
    if (s == "combined") return Axis::Combined;
    throw InvalidArgument("unknown axis '" + std::string(s) + "'");
}

ObstacleSet sample_obstacles(int count, const SamplingParams& p, std::uint64_t seed) {
    if (count < 0 || count > 10) {
        throw OutOfRange("obstacle count must lie in [0, 10], got " + std::to_string(count));
    }
    const double room = std::min(p.domain.lx, p.domain.ly) - 2.0 * p.margin_min;
    if (!(p.size_lo > 0.0) || p.size_hi < p.size_lo || p.size_hi > room) {
        throw InvalidArgument("obstacle size range does not fit inside the margin box");
    }
    if (p.max_attempts < 1 || p.margin_min < 0.0 || p.gap_min < 0.0) {
        throw InvalidArgument("invalid sampling parameters");
    }

    ObstacleSet set;
    set.seed = seed;
    set.domain = p.domain;
    CounterRng rng(derive_seed(seed, "obstacles"));
    int rejections = 0;
    while (static_cast<int>(set.obstacles.size()) < count) {
        Rect r;
        r.w = rng.uniform(p.size_lo, p.size_hi);
        r.h = p.squares ? r.w : rng.uniform(p.size_lo, p.size_hi);
        r.x = rng.uniform(p.margin_min, p.domain.lx - p.margin_min - r.w);
        r.y = rng.uniform(p.margin_min, p.domain.ly - p.margin_min - r.h);
        const bool clear = std::all_of(set.obstacles.begin(), set.obstacles.end(),
                                       [&](const Rect& o) { return separation(o, r) >= p.gap_min; });
        if (clear) {
            set.obstacles.push_back(r);
        } else if (++rejections >= p.max_attempts) {
            throw PlacementExhausted("placed " + std::to_string(set.obstacles.size()) + " of " +
                                     std::to_string(count) + " obstacles after " +
                                     std::to_string(rejections) + " rejections");
        }
    }
    return set;
}

BinaryMask rasterize_mask(const ObstacleSet& obs, GridDims dims) {
    if (dims.h < 1 || dims.w < 1) throw InvalidArgument("grid must have at least one cell");
    BinaryMask m = BinaryMask::all_fluid(dims, obs.domain);
    const double dx = m.dx();
    const double dy = m.dy();
    for (int j = 0; j < dims.h; ++j) {
        const double yc = (j + 0.5) * dy;
        for (int i = 0; i < dims.w; ++i) {
            const double xc = (i + 0.5) * dx;
            for (const Rect& r : obs.obstacles) {
                if (r.contains(xc, yc)) {
                    m.fluid[static_cast<std::size_t>(j) * dims.w + i] = 0;
                    break;
                }
            }
        }
    }
    return m;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), one line.
void edt_1d(const double* f, double* out, int n, std::ptrdiff_t stride, double spacing,
            std::vector<int>& v, std::vector<double>& z, std::vector<double>& buf) {
    for (int q = 0; q < n; ++q) buf[q] = f[q * stride];
    int k = -1;
    const double s2 = spacing * spacing;
    for (int q = 0; q < n; ++q) {
        if (buf[q] == kInf) continue;
        while (k >= 0) {
            const int p = v[k];
            const double s =
                ((buf[q] + s2 * q * q) - (buf[p] + s2 * p * p)) / (2.0 * s2 * (q - p));
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = k == 0 ? -kInf : ((buf[q] + s2 * q * q) - (buf[v[k - 1]] + s2 * v[k - 1] * v[k - 1])) /
                                    (2.0 * s2 * (q - v[k - 1]));
        z[k + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) out[q * stride] = kInf;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) ++j;
        const double d = spacing * (q - v[j]);
        out[q * stride] = d * d + buf[v[j]];
    }
}

}  // namespace

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                               GridDims dims, double dx, double dy) {
    const int h = dims.h;
    const int w = dims.w;
    std::vector<double> g(feature.size());
    for (std::size_t k = 0; k < feature.size(); ++k) g[k] = feature[k] ? 0.0 : kInf;

    const int n = std::max(h, w);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    std::vector<double> buf(n);

    // columns (vary j), then rows (vary i)
    for (int i = 0; i < w; ++i) edt_1d(&g[i], &g[i], h, w, dy, v, z, buf);
    for (int j = 0; j < h; ++j) {
        double* row = &g[static_cast<std::size_t>(j) * w];
        edt_1d(row, row, w, 1, dx, v, z, buf);
    }
    return g;
}

SdfField compute_sdf(const BinaryMask& mask) {
    const std::size_t n_fluid = mask.fluid_count();
    if (n_fluid == 0) throw AllSolid("mask contains no fluid cell");

    SdfField sdf;
    sdf.dims = mask.dims;
    const double cap = std::hypot(mask.domain.lx, mask.domain.ly);
    if (n_fluid == mask.fluid.size()) {
        sdf.values.assign(mask.fluid.size(), cap);
        return sdf;
    }

    std::vector<std::uint8_t> solid(mask.fluid.size());
    for (std::size_t k = 0; k < solid.size(); ++k) solid[k] = mask.fluid[k] ? 0 : 1;

    const double dx = mask.dx();
    const double dy = mask.dy();
    const auto to_solid = squared_distance_transform(solid, mask.dims, dx, dy);
    const auto to_fluid = squared_distance_transform(mask.fluid, mask.dims, dx, dy);
    const double half = 0.5 * std::min(dx, dy);

    sdf.values.resize(mask.fluid.size());
    for (std::size_t k = 0; k < sdf.values.size(); ++k) {
        if (mask.fluid[k]) {
            sdf.values[k] = std::min(cap, std::sqrt(to_solid[k]) - half);
        } else {
            sdf.values[k] = -(std::sqrt(to_fluid[k]) - half);
        }
    }
    return sdf;
}

DifficultyTier classify_geometry_difficulty(int obstacle_count) {
    if (obstacle_count < 0 || obstacle_count > 10) {
        throw OutOfRange("obstacle count must lie in [0, 10], got " +
                         std::to_string(obstacle_count));
    }
    const Tier t = obstacle_count == 0 ? Tier::Easy
                   : obstacle_count == 1 ? Tier::Medium
                                         : Tier::Hard;
    return {t, Axis::Geometry};
}

int label_fluid_components(const BinaryMask& mask, std::vector<int>& labels) {
    const int h = mask.dims.h;
    const int w = mask.dims.w;
    labels.assign(mask.fluid.size(), -1);
    std::vector<int> stack;
    int count = 0;
    for (int start = 0; start < h * w; ++start) {
        if (!mask.fluid[start] || labels[start] >= 0) continue;
        labels[start] = count;
        stack.push_back(start);
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            const int i = c % w;
            const int j = c / w;
            const int nbr[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
            for (const auto& q : nbr) {
                if (q[0] < 0 || q[0] >= w || q[1] < 0 || q[1] >= h) continue;
                const int k = q[1] * w + q[0];
                if (mask.fluid[k] && labels[k] < 0) {
                    labels[k] = count;
                    stack.push_back(k);
                }
            }
        }
        ++count;
    }
    return count;
}

bool fluid_connected(const BinaryMask& mask) {
    std::vector<int> labels;
    return label_fluid_components(mask, labels) == 1;
}

}  // namespace nspregen::geometry
