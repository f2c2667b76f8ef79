#pragma once

#include <cstdint>
#include <string_view>

#include "nspregen/geometry.hpp"

namespace nspregen::physics {

struct FluidParams {
    double nu = 1.5e-5;  ///< kinematic viscosity, m^2/s
    double L = 2.0;      ///< characteristic length, m
    double H = 2.0;      ///< channel height, m
};

/// Truncated-Gaussian Reynolds-number band.
struct ReBand {
    double lo = 100.0;
    double hi = 1000.0;
    double mean = 550.0;
    double sigma = 225.0;

    /// Mean at the midpoint, sigma a quarter of the width.
    static ReBand centered(double lo, double hi) { return {lo, hi, 0.5 * (lo + hi), 0.25 * (hi - lo)}; }
    void validate() const;
    friend bool operator==(const ReBand&, const ReBand&) = default;
};

namespace bands {
inline const ReBand kEasy = ReBand::centered(100.0, 1000.0);
inline const ReBand kMedium = ReBand::centered(2000.0, 4000.0);
inline const ReBand kHard = ReBand::centered(8000.0, 10000.0);
/// Broad generation band, N(5000, 2000^2) on [100, 10000].
inline const ReBand kBaseline{100.0, 10000.0, 5000.0, 2000.0};
}  // namespace bands

struct Schedule {
    double t_end = 0.0;           ///< s
    double write_interval = 0.0;  ///< s
    int n_frames = 20;
    double gamma = 0.0;  ///< 0 on the fixed-duration branch
    double t_nd = 0.0;   ///< viscous time scale, 0 on the fixed branch
    bool fixed = false;
};

enum class FlowKind { FPO, LDC };

std::string_view to_string(FlowKind k) noexcept;
FlowKind parse_kind(std::string_view s);

struct BoundarySetup {
    FlowKind kind = FlowKind::FPO;
    double speed = 0.0;  ///< peak inlet speed (FPO) or lid speed (LDC), m/s
    double re = 0.0;
};

/// Draws Re from the truncated normal of `band`; deterministic in `seed`.
double sample_reynolds(const ReBand& band, std::uint64_t seed);

/// Peak Poiseuille speed for Re = U_avg L / nu with U_avg = 2/3 U_max.
double umax_from_re_fpo(double re, const FluidParams& p);

/// 4 u_max y (H - y) / H^2; throws OutOfDomain outside [0, H].
double inlet_profile(double u_max, double H, double y);

double lid_speed_from_re(double re, const FluidParams& p);

BoundarySetup boundary_from_re(FlowKind kind, double re, const FluidParams& p);

/// Multiplicative end-time factor for Re >= 100. Rows share endpoints;
/// the lower row claims the shared value (400 maps to 3, not 4).
double schedule_gamma(double re);

/// End time and write interval for 20 frames.
///
/// Re < 100 runs for a fixed 2700 s. Otherwise T_end = gamma(Re) * L^2/(nu Re)
/// rounded up to the next multiple of 100 s. Throws OutOfRange outside [10, 10000].
Schedule schedule_end_time(double re, const FluidParams& p);

/// Easy [100, 1000], medium [2000, 4000], hard [8000, 10000], closed bands.
geometry::DifficultyTier classify_physics_difficulty(double re);

}  // namespace nspregen::physics
