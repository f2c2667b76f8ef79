#include "nspregen/physics.hpp"

#include <cmath>
#include <string>

#include "nspregen/errors.hpp"
#include "nspregen/rng.hpp"

namespace nspregen::physics {

void ReBand::validate() const {
    if (!(lo > 0.0 && lo < hi && mean >= lo && mean <= hi && sigma > 0.0)) {
        throw InvalidArgument("Re band must satisfy 0 < lo < hi, lo <= mean <= hi, sigma > 0");
    }
}

std::string_view to_string(FlowKind k) noexcept { return k == FlowKind::FPO ? "fpo" : "ldc"; }

FlowKind parse_kind(std::string_view s) {
    if (s == "fpo" || s == "FPO") return FlowKind::FPO;
    if (s == "ldc" || s == "LDC") return FlowKind::LDC;
    throw InvalidArgument("unknown flow kind '" + std::string(s) + "'");
}

double sample_reynolds(const ReBand& band, std::uint64_t seed) {
    band.validate();
    CounterRng rng(derive_seed(seed, "reynolds"));
    const double width = band.hi - band.lo;
    if (width >= band.sigma) {
        // Normal proposal; acceptance is at least P(0 <= Z <= 1) ~ 0.34.
        for (;;) {
            const double re = band.mean + band.sigma * rng.normal();
            if (re >= band.lo && re <= band.hi) return re;
        }
    }
    // Narrow band relative to sigma: uniform proposal, Gaussian acceptance
    // (acceptance >= exp(-1/2)).
    for (;;) {
        const double re = rng.uniform(band.lo, band.hi);
        const double z = (re - band.mean) / band.sigma;
        if (rng.uniform() < std::exp(-0.5 * z * z)) return re;
    }
}

double umax_from_re_fpo(double re, const FluidParams& p) {
    if (!(re > 0.0)) throw InvalidArgument("Re must be positive");
    return 1.5 * re * p.nu / p.L;
}

double inlet_profile(double u_max, double H, double y) {
    if (y < 0.0 || y > H) {
        throw OutOfDomain("inlet coordinate " + std::to_string(y) + " outside [0, H]");
    }
    return 4.0 * u_max * y * (H - y) / (H * H);
}

double lid_speed_from_re(double re, const FluidParams& p) {
    if (!(re > 0.0)) throw InvalidArgument("Re must be positive");
    return re * p.nu / p.L;
}

BoundarySetup boundary_from_re(FlowKind kind, double re, const FluidParams& p) {
    BoundarySetup b;
    b.kind = kind;
    b.re = re;
    b.speed = kind == FlowKind::FPO ? umax_from_re_fpo(re, p) : lid_speed_from_re(re, p);
    return b;
}

double schedule_gamma(double re) {
    struct Row {
        double upper;
        double gamma;
    };
    static constexpr Row kRows[] = {{200.0, 1.0},  {300.0, 2.0},   {400.0, 3.0},
                                    {500.0, 4.0},  {1000.0, 5.0},  {2500.0, 10.0},
                                    {4000.0, 20.0}, {5000.0, 30.0}, {10000.0, 40.0}};
    if (re < 100.0 || re > 10000.0) throw OutOfRange("Re outside the scheduled range");
    for (const Row& r : kRows) {
        if (re <= r.upper) return r.gamma;
    }
    return 40.0;
}

Schedule schedule_end_time(double re, const FluidParams& p) {
    if (!(re >= 10.0 && re <= 10000.0)) {
        throw OutOfRange("Re " + std::to_string(re) + " outside [10, 10000]");
    }
    Schedule s;
    if (re < 100.0) {
        s.fixed = true;
        s.t_end = 2700.0;
    } else {
        s.gamma = schedule_gamma(re);
        s.t_nd = p.L * p.L / (p.nu * re);
        // Guard against 1800.0000000001-style round-off pushing a whole bucket.
        const double raw = s.gamma * s.t_nd;
        s.t_end = 100.0 * std::ceil(raw / 100.0 - 1e-9);
    }
    s.write_interval = s.t_end / s.n_frames;
    return s;
}

geometry::DifficultyTier classify_physics_difficulty(double re) {
    using geometry::Tier;
    if (!(re > 0.0)) throw InvalidArgument("Re must be positive");
    Tier t;
    if (re >= 100.0 && re <= 1000.0) {
        t = Tier::Easy;
    } else if (re >= 2000.0 && re <= 4000.0) {
        t = Tier::Medium;
    } else if (re >= 8000.0 && re <= 10000.0) {
        t = Tier::Hard;
    } else {
        throw UnbandedRe("Re " + std::to_string(re) + " lies outside every difficulty band");
    }
    return {t, geometry::Axis::Physics};
}

}  // namespace nspregen::physics
