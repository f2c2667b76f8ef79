#include <doctest.h>

#include <cmath>

#include "nspregen/errors.hpp"
#include "nspregen/rng.hpp"
#include "nspregen/solver.hpp"

using namespace nspregen;
using namespace nspregen::solver;
using physics::FlowKind;

namespace {

CaseSetup make_case(FlowKind kind, double re, GridDims grid, const geometry::ObstacleSet& obs = {}) {
    SolverParams sp;
    sp.grid = grid;
    return build_case(obs, physics::boundary_from_re(kind, re, {}), {}, sp);
}

FlowState random_projected(const CaseSetup& c, std::uint64_t seed, double amp) {
    FlowState s(c.mask.dims.w, c.mask.dims.h);
    CounterRng rng(seed);
    for (auto& x : s.u) x = rng.uniform(-amp, amp);
    for (auto& x : s.v) x = rng.uniform(-amp, amp);
    project_divergence_free(s, c);
    return s;
}

}  // namespace

TEST_CASE("build_case: empty FPO channel") {
    const auto c = make_case(FlowKind::FPO, 500, {32, 32});
    CHECK(c.mask.solid_count() == 0);
    CHECK(c.boundary.speed == doctest::Approx(0.005625).epsilon(1e-14));
    CHECK(c.schedule.t_end == 2200);
    const FlowState s = initial_state(c);
    for (double v : s.v) CHECK(v == 0.0);
    for (int j = 0; j < 32; ++j) {
        for (int i = 1; i <= 32; ++i) CHECK(s.U(i, j) == 0.0);
    }
}

TEST_CASE("build_case: LDC lid speed") {
    const auto c = make_case(FlowKind::LDC, 100, {16, 16});
    CHECK(c.boundary.speed == doctest::Approx(0.00075).epsilon(1e-14));
    CHECK(c.u_ref() == c.boundary.speed);
}

TEST_CASE("build_case: blocked channel is disconnected") {
    geometry::ObstacleSet obs;
    obs.obstacles = {{0.9, 0.0, 0.3, 1.0}, {0.9, 1.0, 0.3, 1.0}};
    CHECK_THROWS_AS(make_case(FlowKind::FPO, 500, {8, 8}, obs), DisconnectedDomain);
    geometry::ObstacleSet pocket;
    pocket.obstacles = {{0.5, 0.5, 1.0, 0.2}, {0.5, 1.3, 1.0, 0.2}, {0.5, 0.5, 0.2, 1.0}, {1.3, 0.5, 0.2, 1.0}};
    CHECK_THROWS_AS(make_case(FlowKind::LDC, 500, {20, 20}, pocket), DisconnectedDomain);
}

TEST_CASE("rest is a fixed point without forcing") {
    auto c = make_case(FlowKind::LDC, 100, {16, 16});
    c.boundary.speed = 0.0;
    FlowState s(16, 16);
    const FlowState next = step(s, c, 10.0);
    for (double x : next.u) CHECK(x == 0.0);
    for (double x : next.v) CHECK(x == 0.0);
    for (double x : next.p) CHECK(x == 0.0);
    CHECK(next.t == 10.0);
}

TEST_CASE("Poiseuille state stays divergence free over one step") {
    auto c = make_case(FlowKind::FPO, 100, {32, 64});
    FlowState s0(64, 32);
    for (int j = 0; j < 32; ++j) {
        const double u = physics::inlet_profile(c.boundary.speed, 2.0, (j + 0.5) * c.mask.dy());
        for (int i = 0; i <= 64; ++i) s0.U(i, j) = u;
    }
    FlowState s = s0;
    Stepper st(c);
    st.advance(s, st.stable_dt(s));
    const double loose = max_scaled_divergence(s, c.mask, c.u_ref());
    MESSAGE("default tolerances: " << loose);
    CHECK(loose <= 1e-6);

    c.solver.p_tol = 1e-12;
    c.solver.p_rel_tol = 1e-12;
    s = s0;
    Stepper tight(c);
    tight.advance(s, tight.stable_dt(s));
    const double d = max_scaled_divergence(s, c.mask, c.u_ref());
    MESSAGE("tight tolerances: " << d);
    CHECK(d <= 1e-8);
}

TEST_CASE("energy is non-increasing for a resting lid") {
    auto c = make_case(FlowKind::LDC, 100, {16, 16});
    c.boundary.speed = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        FlowState s = random_projected(c, seed, 1e-3);
        const double e0 = kinetic_energy(s, c.mask);
        Stepper st(c);
        st.advance(s, st.stable_dt(s));
        CHECK(kinetic_energy(s, c.mask) <= e0);
    }
}

TEST_CASE("divergence: uniform and linear fields") {
    const auto c = make_case(FlowKind::LDC, 100, {8, 8});
    FlowState s(8, 8);
    for (auto& x : s.u) x = 0.3;
    for (double d : divergence(s, c.mask)) CHECK(d == 0.0);
    const double slope = 0.7;
    for (int j = 0; j < 8; ++j) {
        for (int i = 0; i <= 8; ++i) s.U(i, j) = slope * i * c.mask.dx();
    }
    for (double d : divergence(s, c.mask)) CHECK(d == doctest::Approx(slope).epsilon(1e-12));
}

TEST_CASE("divergence: random field against the stencil") {
    geometry::SamplingParams sp;
    const auto obs = geometry::sample_obstacles(2, sp, 5);
    const auto c = make_case(FlowKind::FPO, 300, {16, 16}, obs);
    FlowState s(16, 16);
    CounterRng rng(9);
    for (auto& x : s.u) x = rng.uniform(-1, 1);
    for (auto& x : s.v) x = rng.uniform(-1, 1);
    const auto d = divergence(s, c.mask);
    const double dx = c.mask.dx(), dy = c.mask.dy();
    for (int j = 0; j < 16; ++j) {
        for (int i = 0; i < 16; ++i) {
            const double want = c.mask.is_fluid(i, j)
                                    ? (s.u[j * 17 + i + 1] - s.u[j * 17 + i]) / dx + (s.v[(j + 1) * 16 + i] - s.v[j * 16 + i]) / dy
                                    : 0.0;
            CHECK(d[j * 16 + i] == want);
        }
    }
}

TEST_CASE("boundary fidelity after stepping around obstacles") {
    geometry::SamplingParams sp;
    const auto obs = geometry::sample_obstacles(3, sp, 11);
    const auto c = make_case(FlowKind::FPO, 800, {32, 32}, obs);
    FlowState s = initial_state(c);
    Stepper st(c);
    for (int k = 0; k < 20; ++k) st.advance(s, st.stable_dt(s));
    const auto& m = c.mask;
    for (int j = 0; j < 32; ++j) {
        CHECK(s.U(0, j) == physics::inlet_profile(c.boundary.speed, 2.0, (j + 0.5) * m.dy()));
        for (int i = 1; i < 32; ++i) {
            if (!m.is_fluid(i - 1, j) || !m.is_fluid(i, j)) CHECK(s.U(i, j) == 0.0);
        }
    }
    for (int i = 0; i < 32; ++i) {
        CHECK(s.V(i, 0) == 0.0);
        CHECK(s.V(i, 32) == 0.0);
        for (int j = 1; j < 32; ++j) {
            if (!m.is_fluid(i, j - 1) || !m.is_fluid(i, j)) CHECK(s.V(i, j) == 0.0);
        }
    }
    CHECK(max_scaled_divergence(s, m, c.u_ref()) <= 1e-6);
}

TEST_CASE("run_simulation: frames, gauge, constant channels and determinism") {
    geometry::SamplingParams sp;
    const auto obs = geometry::sample_obstacles(1, sp, 3);
    auto c = make_case(FlowKind::LDC, 400, {16, 16}, obs);
    int seen = 0;
    const auto a = run_simulation(c, [&](int k, const FlowState& s) {
        CHECK(k == seen++);
        CHECK(s.t == doctest::Approx((k + 1) * c.schedule.write_interval).epsilon(1e-12));
    });
    CHECK(seen == 20);
    const auto& T = a.trajectory;
    REQUIRE(T.T == 20);
    CHECK(a.cost.steps >= 20);
    CHECK(a.cost.wall_seconds > 0.0);
    CHECK(a.frame_divergence.size() == 20);
    for (double d : a.frame_divergence) CHECK(d <= 1e-6);
    for (int t = 0; t < 20; ++t) {
        double mean = 0;
        for (int j = 0; j < 16; ++j) {
            for (int i = 0; i < 16; ++i) {
                if (c.mask.is_fluid(i, j)) mean += T.at(t, j, i, kP);
                for (int ch : {kReHat, kMask, kSdf}) CHECK(T.at(t, j, i, ch) == T.at(0, j, i, ch));
            }
        }
        CHECK(std::abs(mean) < 1e-6 * c.u_ref() * c.u_ref() * 256);
    }
    CHECK(T.at(0, 0, 0, kReHat) == static_cast<float>(0.04));

    const auto b = run_simulation(c);
    CHECK(a.trajectory.data == b.trajectory.data);
    CHECK(a.cost.steps == b.cost.steps);
}

TEST_CASE("run_simulation: export grid resampling") {
    auto c = make_case(FlowKind::LDC, 100, {16, 16});
    c.export_grid = {32, 32};
    const auto r = run_simulation(c);
    CHECK(r.trajectory.H == 32);
    CHECK(r.trajectory.W == 32);
}

TEST_CASE("run_simulation: aborted run carries its partial cost") {
    auto c = make_case(FlowKind::FPO, 500, {16, 16});
    c.solver.max_steps = 3;
    try {
        run_simulation(c);
        FAIL("expected an abort");
    } catch (const RunAborted& e) {
        CHECK(e.partial().steps == 4);
        CHECK(e.partial().re == 500);
    }
}
