#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "nspregen/geometry.hpp"
#include "nspregen/physics.hpp"

namespace nspregen {

/// Channel order of every stored frame.
enum Channel : int { kU = 0, kV = 1, kP = 2, kReHat = 3, kMask = 4, kSdf = 5 };
inline constexpr int kChannels = 6;
inline constexpr std::array<std::string_view, kChannels> kChannelNames = {"u", "v", "p", "re_hat", "mask", "sdf"};
inline constexpr double kReNormalization = 10000.0;

struct TrajectoryMeta {
    std::uint64_t sim_id = 0;
    std::uint64_t seed = 0;
    double re = 0.0;
    physics::FlowKind kind = physics::FlowKind::FPO;
    double t_end = 0.0;
    double write_interval = 0.0;
    double gamma = 0.0;
    bool fixed_schedule = false;
    geometry::Extent domain;

    friend bool operator==(const TrajectoryMeta&, const TrajectoryMeta&) = default;
};

/// T x H x W x C single-precision tensor, channel fastest; row 0 is the bottom.
struct Trajectory {
    TrajectoryMeta meta;
    int T = 0;
    int H = 0;
    int W = 0;
    int C = kChannels;
    std::vector<float> data;

    Trajectory() = default;
    Trajectory(int t, int h, int w, int c = kChannels)
        : T(t), H(h), W(w), C(c), data(static_cast<std::size_t>(t) * h * w * c, 0.0f) {}

    std::size_t offset(int t, int j, int i, int c) const noexcept {
        return ((static_cast<std::size_t>(t) * H + j) * W + i) * C + c;
    }
    float& at(int t, int j, int i, int c) noexcept { return data[offset(t, j, i, c)]; }
    float at(int t, int j, int i, int c) const noexcept { return data[offset(t, j, i, c)]; }

    /// One channel of one frame as doubles, row-major H*W.
    std::vector<double> channel(int t, int c) const;
};

}  // namespace nspregen
