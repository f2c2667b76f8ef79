#include <doctest.h>

#include <cmath>
#include <cstring>
#include <functional>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "nspregen/errors.hpp"
#include "nspregen/rng.hpp"
#include "nspregen/trajio.hpp"

using namespace nspregen;
using namespace nspregen::trajio;
namespace fs = std::filesystem;

namespace {

Trajectory random_traj(int T, int H, int W, std::uint64_t seed) {
    Trajectory tr(T, H, W);
    CounterRng rng(seed);
    for (auto& x : tr.data) x = static_cast<float>(rng.uniform(-2.0, 2.0));
    tr.meta.sim_id = seed * 7 + 1;
    tr.meta.seed = seed;
    tr.meta.re = 1234.5;
    tr.meta.kind = physics::FlowKind::LDC;
    tr.meta.t_end = 1800;
    tr.meta.write_interval = 90;
    tr.meta.gamma = 5;
    tr.meta.fixed_schedule = false;
    return tr;
}

fs::path temp_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("nspregen_test_trajio_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

// Bilinear value at (x, y) from the four source centers around it, written
// with explicit coordinates and Lagrange weights.
double bilinear_oracle(const GridField& g, double x, double y) {
    const double dx = g.extent.lx / g.dims.w, dy = g.extent.ly / g.dims.h;
    auto pick = [](double s, double h, int n) {
        int lo = 0;
        for (int k = 0; k + 1 < n; ++k) {
            if ((k + 0.5) * h <= s) lo = k;
        }
        return lo;
    };
    const int i0 = pick(x, dx, g.dims.w), j0 = pick(y, dy, g.dims.h);
    const double x0 = (i0 + 0.5) * dx, x1 = (i0 + 1.5) * dx;
    const double y0 = (j0 + 0.5) * dy, y1 = (j0 + 1.5) * dy;
    auto f = [&](int i, int j) { return g.values[static_cast<std::size_t>(j) * g.dims.w + i]; };
    const double wx0 = (x1 - x) / (x1 - x0), wx1 = (x - x0) / (x1 - x0);
    const double wy0 = (y1 - y) / (y1 - y0), wy1 = (y - y0) / (y1 - y0);
    return wy0 * (wx0 * f(i0, j0) + wx1 * f(i0 + 1, j0)) + wy1 * (wx0 * f(i0, j0 + 1) + wx1 * f(i0 + 1, j0 + 1));
}

GridField make_field(geometry::GridDims d, const std::function<double(double, double)>& fn) {
    GridField g;
    g.dims = d;
    g.values.resize(static_cast<std::size_t>(d.h) * d.w);
    const double dx = g.extent.lx / d.w, dy = g.extent.ly / d.h;
    for (int j = 0; j < d.h; ++j) {
        for (int i = 0; i < d.w; ++i) g.values[static_cast<std::size_t>(j) * d.w + i] = fn((i + 0.5) * dx, (j + 0.5) * dy);
    }
    return g;
}

}  // namespace

TEST_CASE("encode/decode round trip is bit exact in both byte orders") {
    const auto tr = random_traj(3, 8, 5, 11);
    for (ByteOrder bo : {ByteOrder::Little, ByteOrder::Big}) {
        const auto bytes = encode(tr, {bo});
        CHECK(bytes.size() == kHeaderBytes + tr.data.size() * 4);
        CHECK(std::string(bytes.begin() + 4, bytes.begin() + 6) == (bo == ByteOrder::Little ? "LE" : "BE"));
        const auto back = decode(bytes);
        CHECK(back.meta == tr.meta);
        CHECK(back.T == 3);
        CHECK(back.H == 8);
        CHECK(back.W == 5);
        CHECK(std::memcmp(back.data.data(), tr.data.data(), tr.data.size() * 4) == 0);
    }
}

TEST_CASE("canonical file size") {
    const auto dir = temp_dir("size");
    Trajectory tr(20, 128, 128);
    write_trajectory(tr, dir / "a.nst");
    CHECK(fs::file_size(dir / "a.nst") - kHeaderBytes == 7'864'320);
    CHECK(is_valid_trajectory_file(dir / "a.nst"));
    int T = 0, H = 0, W = 0;
    read_meta(dir / "a.nst", &T, &H, &W);
    CHECK(T == 20);
    CHECK(H == 128);
    CHECK(W == 128);
    fs::remove_all(dir);
}

TEST_CASE("decode rejects damaged inputs") {
    const auto tr = random_traj(2, 4, 4, 3);
    auto bytes = encode(tr);

    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(decode(truncated), CorruptPayload);
    CHECK_THROWS_AS(decode(std::span<const std::uint8_t>(bytes.data(), 100)), CorruptPayload);

    auto magic = bytes;
    magic[0] = 'X';
    CHECK_THROWS_AS(decode(magic), BadMagic);

    auto version = bytes;
    version[6] = 9;
    CHECK_THROWS_AS(decode(version), VersionMismatch);

    auto tag = bytes;
    tag[4] = 'Q';
    CHECK_THROWS_AS(decode(tag), CorruptPayload);

    auto nan = tr;
    nan.data[5] = std::numeric_limits<float>::quiet_NaN();
    CHECK_THROWS_AS(decode(encode(nan)), CorruptPayload);
}

TEST_CASE("write rejects inconsistent shapes and reports io failures") {
    const auto dir = temp_dir("shape");
    Trajectory bad(2, 4, 4);
    bad.data.pop_back();
    CHECK_THROWS_AS(write_trajectory(bad, dir / "bad.nst"), InvalidShape);
    CHECK_THROWS_AS(write_trajectory(Trajectory{}, dir / "empty.nst"), InvalidShape);
    CHECK_THROWS_AS(read_trajectory(dir / "missing.nst"), IoError);
    CHECK(!is_valid_trajectory_file(dir / "missing.nst"));
    fs::remove_all(dir);
}

TEST_CASE("file round trip and raw export") {
    const auto dir = temp_dir("raw");
    const auto tr = random_traj(2, 6, 7, 5);
    write_trajectory(tr, dir / "t.nst");
    const auto back = read_trajectory(dir / "t.nst");
    CHECK(back.data == tr.data);
    CHECK(back.meta == tr.meta);

    write_raw(tr, dir / "t.raw", dir / "t.json");
    CHECK(fs::file_size(dir / "t.raw") == tr.data.size() * 4);
    std::ifstream js(dir / "t.json");
    const auto j = nlohmann::json::parse(js);
    CHECK(j["shape"] == nlohmann::json::array({2, 6, 7, 6}));
    CHECK(j["channels"][5] == "sdf");
    CHECK(j["row0"] == "bottom");
    fs::remove_all(dir);
}

TEST_CASE("resample: identity when dims match") {
    CounterRng rng(1);
    auto g = make_field({16, 16}, [&](double, double) { return rng.uniform(); });
    CHECK(resample_to_grid(g, {16, 16}).values == g.values);
}

TEST_CASE("resample: affine fields are reproduced exactly") {
    auto affine = [](double x, double y) { return 0.3 + 1.7 * x - 0.9 * y; };
    const auto g = make_field({64, 64}, affine);
    for (geometry::GridDims t : {geometry::GridDims{128, 128}, geometry::GridDims{32, 48}}) {
        const auto r = resample_to_grid(g, t);
        const auto want = make_field(t, affine);
        for (std::size_t k = 0; k < r.values.size(); ++k) CHECK(r.values[k] == doctest::Approx(want.values[k]).epsilon(1e-12));
    }
}

TEST_CASE("resample: linear in the field") {
    CounterRng rng(2);
    auto a = make_field({20, 24}, [&](double, double) { return rng.uniform(); });
    auto b = make_field({20, 24}, [&](double, double) { return rng.uniform(); });
    GridField c = a;
    for (std::size_t k = 0; k < c.values.size(); ++k) c.values[k] = 2.0 * a.values[k] - 3.0 * b.values[k];
    const auto ra = resample_to_grid(a, {37, 41}), rb = resample_to_grid(b, {37, 41}), rc = resample_to_grid(c, {37, 41});
    for (std::size_t k = 0; k < rc.values.size(); ++k) {
        CHECK(std::abs(rc.values[k] - (2.0 * ra.values[k] - 3.0 * rb.values[k])) <= 1e-12);
    }
}

TEST_CASE("resample: 64 to 128 matches the bilinear oracle") {
    CounterRng rng(3);
    const auto g = make_field({64, 64}, [&](double, double) { return rng.uniform(-1, 1); });
    const auto r = resample_to_grid(g, {128, 128});
    const double h = 2.0 / 128;
    for (int j = 0; j < 128; ++j) {
        for (int i = 0; i < 128; ++i) {
            CHECK(std::abs(r.values[j * 128 + i] - bilinear_oracle(g, (i + 0.5) * h, (j + 0.5) * h)) <= 1e-12);
        }
    }
}

TEST_CASE("resample_mask and trajectory resampling") {
    auto m = geometry::BinaryMask::all_fluid({8, 8}, {});
    m.fluid[3 * 8 + 3] = 0;
    const auto r = resample_mask(m, {16, 16});
    CHECK(r.solid_count() == 4);
    CHECK(!r.is_fluid(6, 6));
    CHECK(!r.is_fluid(7, 7));

    Trajectory tr(2, 8, 8);
    for (int t = 0; t < 2; ++t) {
        for (int j = 0; j < 8; ++j) {
            for (int i = 0; i < 8; ++i) {
                const bool fluid = m.is_fluid(i, j);
                tr.at(t, j, i, kU) = fluid ? 1.0f : 0.0f;
                tr.at(t, j, i, kP) = fluid ? static_cast<float>(i) : 0.0f;
                tr.at(t, j, i, kReHat) = 0.25f;
                tr.at(t, j, i, kMask) = fluid ? 1.0f : 0.0f;
            }
        }
    }
    const auto out = resample_trajectory(tr, {16, 16});
    CHECK(out.H == 16);
    for (int t = 0; t < 2; ++t) {
        double mean = 0;
        for (int j = 0; j < 16; ++j) {
            for (int i = 0; i < 16; ++i) {
                CHECK(out.at(t, j, i, kReHat) == 0.25f);
                const bool fluid = r.is_fluid(i, j);
                CHECK(out.at(t, j, i, kMask) == (fluid ? 1.0f : 0.0f));
                CHECK((out.at(t, j, i, kSdf) > 0) == fluid);
                if (fluid) mean += out.at(t, j, i, kP);
                else CHECK(out.at(t, j, i, kU) == 0.0f);
            }
        }
        CHECK(std::abs(mean) < 1e-4);
    }
}
