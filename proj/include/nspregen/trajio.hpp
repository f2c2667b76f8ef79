#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nspregen/geometry.hpp"
#include "nspregen/trajectory.hpp"

namespace nspregen::trajio {

// NST1 layout (all multi-byte fields in the byte order named by the tag):
//
//   0  char[4]  magic "NST1"
//   4  char[2]  byte-order tag "LE" or "BE"
//   6  u16      version
//   8  u16      T, H, W, C
//  16  u32      header size in bytes (192)
//  20  u8       kind (0 = FPO, 1 = LDC)
//  21  u8       1 when the fixed-duration schedule applied
//  22  u16      reserved
//  24  f64      Re
//  32  u64      seed
//  40  u64      sim id
//  48  f64      t_end
//  56  f64      write interval
//  64  f64      gamma
//  72  f64      domain extent x, y
//  88  char[8]  x C channel names, NUL padded
//  ..  zero padding to 192
// 192  f32      T*H*W*C payload, channel fastest
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderBytes = 192;

enum class ByteOrder { Little, Big };

struct WriteOptions {
    ByteOrder order = ByteOrder::Little;
};

std::vector<std::uint8_t> encode(const Trajectory& traj, const WriteOptions& opt = {});
Trajectory decode(std::span<const std::uint8_t> bytes);

/// Throws InvalidShape for empty or inconsistent tensors, IoError on write failure.
/// The file is written to a temporary sibling and renamed into place.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                      const WriteOptions& opt = {});

/// Throws IoError, BadMagic, VersionMismatch or CorruptPayload.
Trajectory read_trajectory(const std::filesystem::path& path);

/// Header-only read (payload not loaded).
TrajectoryMeta read_meta(const std::filesystem::path& path, int* T = nullptr, int* H = nullptr,
                         int* W = nullptr);

/// True when `path` decodes cleanly.
bool is_valid_trajectory_file(const std::filesystem::path& path);

/// Headerless little-endian float32 payload plus a JSON sidecar with shape,
/// channel names and provenance.
void write_raw(const Trajectory& traj, const std::filesystem::path& payload_path,
               const std::filesystem::path& sidecar_path);

struct GridField {
    geometry::GridDims dims;
    geometry::Extent extent;
    std::vector<double> values;  ///< row-major, row 0 at the bottom
};

/// Bilinear interpolation between cell centers, linear extrapolation in the
/// half cell next to the boundary; the identity when dims match.
GridField resample_to_grid(const GridField& src, geometry::GridDims target);

/// Nearest-cell resampling of a mask.
geometry::BinaryMask resample_mask(const geometry::BinaryMask& src, geometry::GridDims target);

/// Resamples every frame: u, v, p, re_hat bilinear; mask nearest; sdf
/// recomputed on the resampled mask. Solid cells are zeroed and p is
/// re-gauged to zero mean over fluid cells.
Trajectory resample_trajectory(const Trajectory& traj, geometry::GridDims target);

}  // namespace nspregen::trajio
