#include <doctest.h>

#include <cmath>
#include <limits>

#include "nspregen/errors.hpp"
#include "nspregen/geometry.hpp"

using namespace nspregen;
using namespace nspregen::geometry;

namespace {

// Distance from (px, py) to the closest edge shared by a fluid and a solid cell.
double brute_interface_distance(const BinaryMask& m, double px, double py) {
    const double dx = m.dx(), dy = m.dy();
    double best = std::numeric_limits<double>::infinity();
    auto seg = [&](double x0, double y0, double x1, double y1) {
        const double vx = x1 - x0, vy = y1 - y0;
        double t = ((px - x0) * vx + (py - y0) * vy) / (vx * vx + vy * vy);
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, std::hypot(px - (x0 + t * vx), py - (y0 + t * vy)));
    };
    for (int j = 0; j < m.dims.h; ++j) {
        for (int i = 0; i < m.dims.w; ++i) {
            if (i + 1 < m.dims.w && m.is_fluid(i, j) != m.is_fluid(i + 1, j)) {
                seg((i + 1) * dx, j * dy, (i + 1) * dx, (j + 1) * dy);
            }
            if (j + 1 < m.dims.h && m.is_fluid(i, j) != m.is_fluid(i, j + 1)) {
                seg(i * dx, (j + 1) * dy, (i + 1) * dx, (j + 1) * dy);
            }
        }
    }
    return best;
}

}  // namespace

TEST_CASE("sample_obstacles: empty set for count 0") {
    const auto s = sample_obstacles(0, {}, 123);
    CHECK(s.size() == 0);
    CHECK(s.seed == 123);
}

TEST_CASE("sample_obstacles: ten disjoint squares inside the margin box") {
    SamplingParams p;
    const auto s = sample_obstacles(10, p, 42);
    REQUIRE(s.size() == 10);
    for (std::size_t a = 0; a < s.size(); ++a) {
        const Rect& r = s.obstacles[a];
        CHECK(r.w == r.h);
        CHECK(r.w >= 0.15);
        CHECK(r.w <= 0.30);
        CHECK(r.x >= 0.1);
        CHECK(r.y >= 0.1);
        CHECK(r.x + r.w <= 1.9);
        CHECK(r.y + r.h <= 1.9);
        for (std::size_t b = a + 1; b < s.size(); ++b) CHECK(separation(r, s.obstacles[b]) >= 0.05);
    }
    CHECK(sample_obstacles(10, p, 42) == s);
    CHECK(!(sample_obstacles(10, p, 43) == s));
}

TEST_CASE("sample_obstacles: oversized squares exhaust placement") {
    SamplingParams p;
    p.size_lo = 1.5;
    p.size_hi = 1.6;
    p.max_attempts = 1000;
    CHECK_THROWS_AS(sample_obstacles(2, p, 1), PlacementExhausted);
    CHECK_THROWS_AS(sample_obstacles(11, SamplingParams{}, 1), OutOfRange);
}

TEST_CASE("separation of rectangles") {
    CHECK(separation({0, 0, 1, 1}, {2, 0, 1, 1}) == doctest::Approx(1.0));
    CHECK(separation({0, 0, 1, 1}, {4, 5, 1, 1}) == doctest::Approx(5.0));
    CHECK(separation({0, 0, 1, 1}, {0.5, 0.5, 1, 1}) == 0.0);
}

TEST_CASE("rasterize_mask: upper-left quadrant on 4x4") {
    ObstacleSet obs;
    obs.obstacles = {{0.0, 1.0, 1.0, 1.0}};
    const auto m = rasterize_mask(obs, {4, 4});
    // Row 0 is the bottom, so the quadrant is columns 0-1 of rows 2-3.
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) CHECK(m.is_fluid(i, j) == !(i < 2 && j >= 2));
    }
    CHECK(m.solid_count() == 4);
    CHECK_THROWS_AS(rasterize_mask(obs, {0, 4}), InvalidArgument);
}

TEST_CASE("rasterize_mask: centered square matches point-in-rect scan") {
    ObstacleSet obs;
    obs.obstacles = {{0.75, 0.75, 0.5, 0.5}};
    const auto m = rasterize_mask(obs, {128, 128});
    std::size_t solid = 0;
    for (int j = 0; j < 128; ++j) {
        for (int i = 0; i < 128; ++i) {
            const double x = (i + 0.5) / 64.0, y = (j + 0.5) / 64.0;
            if (x > 0.75 && x < 1.25 && y > 0.75 && y < 1.25) ++solid;
        }
    }
    CHECK(m.solid_count() == solid);
    CHECK(solid == 32 * 32);
}

TEST_CASE("squared_distance_transform matches brute force") {
    const GridDims d{13, 17};
    std::vector<std::uint8_t> f(d.h * d.w, 0);
    f[3 * d.w + 4] = 1;
    f[10 * d.w + 15] = 1;
    f[7 * d.w + 0] = 1;
    const double dx = 0.3, dy = 0.7;
    const auto g = squared_distance_transform(f, d, dx, dy);
    for (int j = 0; j < d.h; ++j) {
        for (int i = 0; i < d.w; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int q = 0; q < d.h; ++q) {
                for (int p = 0; p < d.w; ++p) {
                    if (f[q * d.w + p]) best = std::min(best, std::pow((i - p) * dx, 2) + std::pow((j - q) * dy, 2));
                }
            }
            CHECK(g[j * d.w + i] == doctest::Approx(best).epsilon(1e-12));
        }
    }
}

TEST_CASE("compute_sdf: all fluid gives the domain diagonal") {
    const auto m = BinaryMask::all_fluid({16, 16}, {});
    const auto s = compute_sdf(m);
    for (double v : s.values) CHECK(v == doctest::Approx(std::hypot(2.0, 2.0)));
}

TEST_CASE("compute_sdf: all solid raises") {
    auto m = BinaryMask::all_fluid({8, 8}, {});
    std::fill(m.fluid.begin(), m.fluid.end(), 0);
    CHECK_THROWS_AS(compute_sdf(m), AllSolid);
}

TEST_CASE("compute_sdf: single solid cell on 33x33") {
    auto m = BinaryMask::all_fluid({33, 33}, {});
    m.fluid[16 * 33 + 16] = 0;
    const auto s = compute_sdf(m);
    const double h = m.dx();
    const double half_diag = 0.5 * std::hypot(h, h);
    CHECK(s.at(16, 16) <= 0.0);
    for (int k = 1; k <= 10; ++k) {
        CHECK(std::abs(s.at(16 + k, 16) - k * h) <= half_diag);
        CHECK(std::abs(s.at(16, 16 - k) - k * h) <= half_diag);
    }
}

TEST_CASE("compute_sdf: sign and magnitude against brute force on random layouts") {
    SamplingParams p;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto obs = sample_obstacles(1 + static_cast<int>(seed % 10), p, seed);
        const auto m = rasterize_mask(obs, {32, 32});
        if (m.solid_count() == 0) continue;
        const auto s = compute_sdf(m);
        const double half_diag = 0.5 * std::hypot(m.dx(), m.dy());
        for (int j = 0; j < 32; ++j) {
            for (int i = 0; i < 32; ++i) {
                const double v = s.at(i, j);
                CHECK((v > 0.0) == m.is_fluid(i, j));
                const double bf = brute_interface_distance(m, (i + 0.5) * m.dx(), (j + 0.5) * m.dy());
                CHECK(std::abs(std::abs(v) - bf) <= half_diag);
            }
        }
    }
}

TEST_CASE("classify_geometry_difficulty") {
    CHECK(classify_geometry_difficulty(0).tier == Tier::Easy);
    CHECK(classify_geometry_difficulty(1).tier == Tier::Medium);
    CHECK(classify_geometry_difficulty(7).tier == Tier::Hard);
    for (int n = 2; n <= 10; ++n) CHECK(classify_geometry_difficulty(n).tier == Tier::Hard);
    CHECK_THROWS_AS(classify_geometry_difficulty(11), OutOfRange);
    CHECK_THROWS_AS(classify_geometry_difficulty(-1), OutOfRange);
}

TEST_CASE("fluid connectivity") {
    auto m = BinaryMask::all_fluid({8, 8}, {});
    CHECK(fluid_connected(m));
    for (int j = 0; j < 8; ++j) m.fluid[j * 8 + 4] = 0;
    CHECK(!fluid_connected(m));
    std::vector<int> labels;
    CHECK(label_fluid_components(m, labels) == 2);
    CHECK(labels[4] == -1);
}

TEST_CASE("tier and axis names round-trip") {
    for (Tier t : {Tier::Easy, Tier::Medium, Tier::Hard}) CHECK(parse_tier(to_string(t)) == t);
    for (Axis a : {Axis::Geometry, Axis::Physics, Axis::Combined}) CHECK(parse_axis(to_string(a)) == a);
    CHECK_THROWS_AS(parse_tier("extreme"), InvalidArgument);
}
