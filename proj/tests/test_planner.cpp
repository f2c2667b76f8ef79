#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "nspregen/errors.hpp"
#include "nspregen/planner.hpp"
#include "nspregen/trajio.hpp"

using namespace nspregen;
using namespace nspregen::planner;
namespace fs = std::filesystem;

namespace {

cost::CostModel model(double easy, double medium, double hard) {
    cost::CostModel m;
    m.axis = Axis::Physics;
    m.seconds = {{Tier::Easy, easy}, {Tier::Medium, medium}, {Tier::Hard, hard}};
    return m;
}

DatasetManifest simple(int easy, int hard) {
    DatasetManifest m;
    m.name = "m";
    TierEntry e = tier_spec(Axis::Physics, Tier::Easy);
    e.count = easy;
    TierEntry h = tier_spec(Axis::Physics, Tier::Hard);
    h.count = hard;
    m.entries = {e, h};
    return m;
}

std::vector<char> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("alpha sweep conserves counts") {
    const auto ms = alpha_sweep_manifest(800, default_alpha_grid(), Tier::Easy, Tier::Hard, Axis::Physics, 7);
    REQUIRE(ms.size() == 7);
    for (const auto& m : ms) CHECK(m.total_count() == 800);
    CHECK(ms[2].name == "alpha_0.10");
    CHECK(ms[2].count(Tier::Hard) == 80);
    CHECK(ms[2].count(Tier::Easy) == 720);
    CHECK(ms[3].count(Tier::Hard) == 200);
    CHECK(ms[3].count(Tier::Easy) == 600);
    CHECK(ms[0].count(Tier::Hard) == 0);
    CHECK(ms[6].count(Tier::Easy) == 0);
    CHECK(ms[1].count(Tier::Hard) == 40);
    for (const auto& m : ms) CHECK(m.held_out == ms[0].held_out);
    CHECK(ms[0].held_out.count == 100);
    CHECK(ms[0].held_out.spec.tier == Tier::Hard);
    CHECK_NOTHROW(check_held_out_disjoint(ms));
    CHECK(hard_count(10, 0.25) == 3);
    CHECK(hard_count(10, 0.24) == 2);
}

TEST_CASE("budget plan: worked example and edge cases") {
    const auto c = model(1, 5, 10);
    std::vector<int> grid;
    for (int g = 1; g <= 1000; ++g) grid.push_back(g);
    const auto plan = budget_augmentation_plan(c, 2720, Tier::Easy, grid);
    CHECK(plan.seed_cost == 2000);
    REQUIRE(plan.feasible_counts.size() == 720);
    CHECK(plan.feasible_counts.front() == 1);
    CHECK(plan.feasible_counts.back() == 720);
    CHECK(plan.binding == "budget");
    for (int g : plan.feasible_counts) CHECK(plan.seed_cost + g * plan.per_example <= 2720);

    CHECK_THROWS_AS(budget_augmentation_plan(c, 1999, Tier::Easy, grid), InfeasibleSeed);

    const auto tiny = budget_augmentation_plan(model(1e-300, 5, 10), 2000, Tier::Easy, default_augmentation_grid());
    CHECK(tiny.feasible_counts == default_augmentation_grid());
    CHECK(tiny.binding == "grid");

    const auto m = budget_manifest(plan, 720, Axis::Physics, 3);
    CHECK(m.count(Tier::Hard) == 200);
    CHECK(m.count(Tier::Easy) == 720);
    CHECK(total_cost(m, c) == 2720);
    CHECK_THROWS_AS(budget_manifest(plan, 721, Axis::Physics, 3), InvalidArgument);
}

TEST_CASE("savings ratio fixture and identities") {
    const auto c = model(1, 5, 10);
    const auto mixed = simple(720, 80);
    const auto ref = all_hard_reference(mixed);
    CHECK(ref.count(Tier::Hard) == 800);
    const double r = compute_savings_ratio(ref, mixed, c);
    CHECK(std::abs(r - 8000.0 / 1520.0) <= 1e-9);
    CHECK(std::round(r * 1000) / 1000 == 5.263);
    CHECK(compute_savings_ratio(mixed, mixed, c) == 1.0);
    for (double k : {1e-3, 0.7, 3.0, 1e4}) {
        CHECK(compute_savings_ratio(ref, mixed, model(k, 5 * k, 10 * k)) == doctest::Approx(r).epsilon(1e-14));
    }
}

TEST_CASE("held-out disjointness is enforced") {
    auto ms = alpha_sweep_manifest(20, {0.5}, Tier::Easy, Tier::Hard, Axis::Physics, 1);
    ms[0].entries[1].base_seed = ms[0].held_out.seed;
    CHECK_THROWS_AS(check_held_out_disjoint(ms), SchemaError);
}

TEST_CASE("manifest JSON round trip and schema errors") {
    auto m = alpha_sweep_manifest(10, {0.3}, Tier::Medium, Tier::Hard, Axis::Geometry, 99)[0];
    FileRef f;
    f.path = "hard_00000.nst";
    f.tier = Tier::Hard;
    f.seed = 0xffffffffffffffffull;
    f.re = 512.25;
    f.obstacles = 4;
    f.status = "ok";
    cost::CostRecord c;
    c.sim_id = 17;
    c.wall_seconds = 1.5;
    c.host = "box";
    f.cost = c;
    m.files = {f};
    CHECK(manifest_from_json(to_json(m)) == m);

    auto j = to_json(m);
    j["entries"][0].erase("count");
    try {
        manifest_from_json(j);
        FAIL("expected SchemaError");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("entries[0].count") != std::string::npos);
    }
    auto v = to_json(m);
    v["version"] = 2;
    CHECK_THROWS_AS(manifest_from_json(v), SchemaError);
    auto t = to_json(m);
    t["axis"] = "sideways";
    CHECK_THROWS_AS(manifest_from_json(t), SchemaError);
}

TEST_CASE("draw_case respects the tier") {
    GenerationSettings g;
    g.solver.grid = {32, 32};
    const auto geo = tier_spec(Axis::Geometry, Tier::Hard);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto c = draw_case(geo, Axis::Geometry, s, g);
        CHECK(c.obstacles.size() >= 2);
        CHECK(c.obstacles.size() <= 10);
        CHECK(c.re >= 100);
        CHECK(c.re <= 1000);
        CHECK(draw_case(geo, Axis::Geometry, s, g).re == c.re);
    }
    const auto phys = tier_spec(Axis::Physics, Tier::Medium);
    const auto c = draw_case(phys, Axis::Physics, 5, g);
    CHECK(c.obstacles.size() == 0);
    CHECK(c.re >= 2000);
    CHECK(c.re <= 4000);
}

TEST_CASE("materialize is deterministic and resumable") {
    const fs::path root = fs::temp_directory_path() / "nspregen_test_materialize";
    fs::remove_all(root);
    GenerationSettings g;
    g.solver.grid = {32, 32};
    g.export_grid = {32, 32};
    DatasetManifest m;
    m.name = "tiny";
    TierEntry e = tier_spec(Axis::Physics, Tier::Easy);
    e.count = 4;
    e.base_seed = 2024;
    m.entries = {e};

    const auto a = materialize_manifest(m, root / "a", g, {2});
    const auto b = materialize_manifest(m, root / "b", g, {1});
    CHECK(a.simulated == 4);
    CHECK(a.failed == 0);
    CHECK(a.costs.size() == 4);
    for (int k = 0; k < 4; ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "easy_%05d.nst", k);
        CHECK(slurp(root / "a" / "tiny" / name) == slurp(root / "b" / "tiny" / name));
        CHECK(a.manifest.files[k].path == name);
    }
    const auto back = read_manifest(a.manifest_path);
    CHECK(back.files.size() == 4);
    CHECK(back.files[0].cost.has_value());

    fs::remove(root / "a" / "tiny" / "easy_00002.nst");
    const auto r = materialize_manifest(m, root / "a", g, {1});
    CHECK(r.simulated == 1);
    CHECK(r.skipped == 3);
    CHECK(r.manifest.files[0].status == "existing");
    CHECK(r.manifest.files[0].cost == a.manifest.files[0].cost);
    CHECK(slurp(root / "a" / "tiny" / "easy_00002.nst") == slurp(root / "b" / "tiny" / "easy_00002.nst"));
    fs::remove_all(root);
}
