#include "nspregen/trajio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "nspregen/errors.hpp"

namespace nspregen {

std::vector<double> Trajectory::channel(int t, int c) const {
    std::vector<double> out(static_cast<std::size_t>(H) * W);
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) out[static_cast<std::size_t>(j) * W + i] = at(t, j, i, c);
    }
    return out;
}

namespace trajio {

namespace {

constexpr char kMagic[4] = {'N', 'S', 'T', '1'};

bool host_is_big() { return std::endian::native == std::endian::big; }

template <typename T>
T byteswap_value(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    std::reverse(b, b + sizeof(T));
    std::memcpy(&v, b, sizeof(T));
    return v;
}

class Writer {
public:
    Writer(std::vector<std::uint8_t>& out, ByteOrder order)
        : out_(out), swap_((order == ByteOrder::Big) != host_is_big()) {}

    template <typename T>
    void put(T v) {
        if (swap_) v = byteswap_value(v);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        out_.insert(out_.end(), p, p + sizeof(T));
    }
    void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
    void pad_to(std::size_t n) { out_.resize(std::max(out_.size(), n), 0); }

private:
    std::vector<std::uint8_t>& out_;
    bool swap_;
};

class Reader {
public:
    Reader(std::span<const std::uint8_t> in, bool swap) : in_(in), swap_(swap) {}

    template <typename T>
    T get(std::size_t offset) const {
        T v;
        std::memcpy(&v, in_.data() + offset, sizeof(T));
        return swap_ ? byteswap_value(v) : v;
    }

private:
    std::span<const std::uint8_t> in_;
    bool swap_;
};

void check_shape(const Trajectory& traj) {
    if (traj.T <= 0 || traj.H <= 0 || traj.W <= 0) {
        throw InvalidShape("trajectory has an empty dimension");
    }
    if (traj.C != kChannels) throw InvalidShape("trajectory must have 6 channels");
    if (traj.T > 0xFFFF || traj.H > 0xFFFF || traj.W > 0xFFFF) {
        throw InvalidShape("trajectory dimension exceeds 65535");
    }
    if (traj.data.size() != static_cast<std::size_t>(traj.T) * traj.H * traj.W * traj.C) {
        throw InvalidShape("trajectory payload size does not match its shape");
    }
}

struct Header {
    int T = 0, H = 0, W = 0, C = 0;
    bool swap = false;
    TrajectoryMeta meta;
};

Header decode_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) throw CorruptPayload("file shorter than the NST1 header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw BadMagic("not an NST1 file");
    Header h;
    const char tag0 = static_cast<char>(bytes[4]);
    const char tag1 = static_cast<char>(bytes[5]);
    bool big;
    if (tag0 == 'L' && tag1 == 'E') {
        big = false;
    } else if (tag0 == 'B' && tag1 == 'E') {
        big = true;
    } else {
        throw CorruptPayload("unknown byte-order tag");
    }
    h.swap = big != host_is_big();
    Reader r(bytes, h.swap);
    const auto version = r.get<std::uint16_t>(6);
    if (version != kVersion) {
        throw VersionMismatch("NST1 version " + std::to_string(version) + " is not supported");
    }
    h.T = r.get<std::uint16_t>(8);
    h.H = r.get<std::uint16_t>(10);
    h.W = r.get<std::uint16_t>(12);
    h.C = r.get<std::uint16_t>(14);
    if (r.get<std::uint32_t>(16) != kHeaderBytes) throw CorruptPayload("unexpected header size");
    if (h.C != kChannels || h.T == 0 || h.H == 0 || h.W == 0) {
        throw CorruptPayload("invalid tensor shape in header");
    }
    const std::uint8_t kind = bytes[20];
    if (kind > 1) throw CorruptPayload("unknown flow kind");
    h.meta.kind = kind == 0 ? physics::FlowKind::FPO : physics::FlowKind::LDC;
    h.meta.fixed_schedule = bytes[21] != 0;
    h.meta.re = r.get<double>(24);
    h.meta.seed = r.get<std::uint64_t>(32);
    h.meta.sim_id = r.get<std::uint64_t>(40);
    h.meta.t_end = r.get<double>(48);
    h.meta.write_interval = r.get<double>(56);
    h.meta.gamma = r.get<double>(64);
    h.meta.domain.lx = r.get<double>(72);
    h.meta.domain.ly = r.get<double>(80);
    for (int c = 0; c < kChannels; ++c) {
        char name[9] = {};
        std::memcpy(name, bytes.data() + 88 + 8 * c, 8);
        if (kChannelNames[c] != std::string_view(name)) {
            throw CorruptPayload("unexpected channel name '" + std::string(name) + "'");
        }
    }
    return h;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::uint8_t> encode(const Trajectory& traj, const WriteOptions& opt) {
    check_shape(traj);
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderBytes + traj.data.size() * 4);
    Writer w(out, opt.order);
    w.bytes(kMagic, 4);
    w.bytes(opt.order == ByteOrder::Big ? "BE" : "LE", 2);
    w.put<std::uint16_t>(kVersion);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(traj.T));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(traj.H));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(traj.W));
    w.put<std::uint16_t>(static_cast<std::uint16_t>(traj.C));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(kHeaderBytes));
    w.put<std::uint8_t>(traj.meta.kind == physics::FlowKind::FPO ? 0 : 1);
    w.put<std::uint8_t>(traj.meta.fixed_schedule ? 1 : 0);
    w.put<std::uint16_t>(0);
    w.put<double>(traj.meta.re);
    w.put<std::uint64_t>(traj.meta.seed);
    w.put<std::uint64_t>(traj.meta.sim_id);
    w.put<double>(traj.meta.t_end);
    w.put<double>(traj.meta.write_interval);
    w.put<double>(traj.meta.gamma);
    w.put<double>(traj.meta.domain.lx);
    w.put<double>(traj.meta.domain.ly);
    for (std::string_view name : kChannelNames) {
        char buf[8] = {};
        std::memcpy(buf, name.data(), std::min<std::size_t>(name.size(), 8));
        w.bytes(buf, 8);
    }
    w.pad_to(kHeaderBytes);
    for (float f : traj.data) w.put<float>(f);
    return out;
}

Trajectory decode(std::span<const std::uint8_t> bytes) {
    const Header h = decode_header(bytes);
    const std::size_t count = static_cast<std::size_t>(h.T) * h.H * h.W * h.C;
    if (bytes.size() != kHeaderBytes + count * 4) {
        throw CorruptPayload("payload holds " + std::to_string(bytes.size() - kHeaderBytes) +
                             " bytes, expected " + std::to_string(count * 4));
    }
    Trajectory traj(h.T, h.H, h.W, h.C);
    traj.meta = h.meta;
    Reader r(bytes, h.swap);
    for (std::size_t k = 0; k < count; ++k) {
        const float f = r.get<float>(kHeaderBytes + 4 * k);
        if (!std::isfinite(f)) throw CorruptPayload("non-finite value in payload");
        traj.data[k] = f;
    }
    return traj;
}

void write_trajectory(const Trajectory& traj, const std::filesystem::path& path,
                      const WriteOptions& opt) {
    const auto bytes = encode(traj, opt);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

Trajectory read_trajectory(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    return decode(bytes);
}

TrajectoryMeta read_meta(const std::filesystem::path& path, int* T, int* H, int* W) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> head(kHeaderBytes);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(kHeaderBytes));
    head.resize(static_cast<std::size_t>(in.gcount()));
    const Header h = decode_header(head);
    if (T) *T = h.T;
    if (H) *H = h.H;
    if (W) *W = h.W;
    return h.meta;
}

bool is_valid_trajectory_file(const std::filesystem::path& path) {
    try {
        read_trajectory(path);
        return true;
    } catch (const Error&) {
        return false;
    }
}

void write_raw(const Trajectory& traj, const std::filesystem::path& payload_path,
               const std::filesystem::path& sidecar_path) {
    check_shape(traj);
    {
        const auto bytes = encode(traj, {ByteOrder::Little});
        std::ofstream out(payload_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + payload_path.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data() + kHeaderBytes),
                  static_cast<std::streamsize>(bytes.size() - kHeaderBytes));
        if (!out) throw IoError("short write to " + payload_path.string());
    }
    nlohmann::json j;
    j["format"] = "float32-le";
    j["order"] = "C";
    j["shape"] = {traj.T, traj.H, traj.W, traj.C};
    j["channels"] = std::vector<std::string>(kChannelNames.begin(), kChannelNames.end());
    j["row0"] = "bottom";
    j["payload"] = payload_path.filename().string();
    j["sim_id"] = traj.meta.sim_id;
    j["seed"] = traj.meta.seed;
    j["re"] = traj.meta.re;
    j["kind"] = std::string(physics::to_string(traj.meta.kind));
    j["t_end"] = traj.meta.t_end;
    j["write_interval"] = traj.meta.write_interval;
    j["gamma"] = traj.meta.gamma;
    j["fixed_schedule"] = traj.meta.fixed_schedule;
    j["domain"] = {traj.meta.domain.lx, traj.meta.domain.ly};
    std::ofstream side(sidecar_path, std::ios::trunc);
    if (!side) throw IoError("cannot open " + sidecar_path.string() + " for writing");
    side << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Resampling

namespace {

struct Axis1D {
    int lo = 0;
    double frac = 0.0;
};

// Source sample position of target center k, as (left index, weight of right).
Axis1D locate(int k, int n_src, int n_dst) {
    const double s = (k + 0.5) * static_cast<double>(n_src) / n_dst - 0.5;
    int lo = static_cast<int>(std::floor(s));
    lo = std::clamp(lo, 0, n_src - 2);
    return {lo, s - lo};
}

}  // namespace

GridField resample_to_grid(const GridField& src, geometry::GridDims target) {
    if (target.h < 2 || target.w < 2 || src.dims.h < 2 || src.dims.w < 2) {
        throw InvalidArgument("resampling needs at least 2x2 grids");
    }
    GridField dst;
    dst.dims = target;
    dst.extent = src.extent;
    if (target == src.dims) {
        dst.values = src.values;
        return dst;
    }
    dst.values.resize(static_cast<std::size_t>(target.h) * target.w);
    const int sw = src.dims.w;
    std::vector<Axis1D> xs(target.w);
    for (int i = 0; i < target.w; ++i) xs[i] = locate(i, sw, target.w);
    for (int j = 0; j < target.h; ++j) {
        const Axis1D y = locate(j, src.dims.h, target.h);
        const double* r0 = &src.values[static_cast<std::size_t>(y.lo) * sw];
        const double* r1 = r0 + sw;
        for (int i = 0; i < target.w; ++i) {
            const Axis1D x = xs[i];
            const double bottom = (1.0 - x.frac) * r0[x.lo] + x.frac * r0[x.lo + 1];
            const double top = (1.0 - x.frac) * r1[x.lo] + x.frac * r1[x.lo + 1];
            dst.values[static_cast<std::size_t>(j) * target.w + i] = (1.0 - y.frac) * bottom + y.frac * top;
        }
    }
    return dst;
}

geometry::BinaryMask resample_mask(const geometry::BinaryMask& src, geometry::GridDims target) {
    geometry::BinaryMask dst = geometry::BinaryMask::all_fluid(target, src.domain);
    for (int j = 0; j < target.h; ++j) {
        const int sj = std::min(src.dims.h - 1, static_cast<int>((j + 0.5) * src.dims.h / target.h));
        for (int i = 0; i < target.w; ++i) {
            const int si = std::min(src.dims.w - 1, static_cast<int>((i + 0.5) * src.dims.w / target.w));
            dst.fluid[static_cast<std::size_t>(j) * target.w + i] = src.is_fluid(si, sj) ? 1 : 0;
        }
    }
    return dst;
}

Trajectory resample_trajectory(const Trajectory& traj, geometry::GridDims target) {
    if (target == geometry::GridDims{traj.H, traj.W}) return traj;
    Trajectory out(traj.T, target.h, target.w, traj.C);
    out.meta = traj.meta;

    geometry::BinaryMask src_mask = geometry::BinaryMask::all_fluid({traj.H, traj.W}, traj.meta.domain);
    for (int j = 0; j < traj.H; ++j) {
        for (int i = 0; i < traj.W; ++i) {
            src_mask.fluid[static_cast<std::size_t>(j) * traj.W + i] = traj.at(0, j, i, kMask) > 0.5f ? 1 : 0;
        }
    }
    const geometry::BinaryMask mask = resample_mask(src_mask, target);
    const geometry::SdfField sdf = geometry::compute_sdf(mask);

    for (int t = 0; t < traj.T; ++t) {
        std::vector<double> fields[4];
        for (int c : {kU, kV, kP, kReHat}) {
            GridField g{{traj.H, traj.W}, traj.meta.domain, traj.channel(t, c)};
            fields[c] = resample_to_grid(g, target).values;
        }
        double mean = 0.0;
        std::size_t n = 0;
        for (std::size_t k = 0; k < mask.fluid.size(); ++k) {
            if (mask.fluid[k]) {
                mean += fields[kP][k];
                ++n;
            }
        }
        mean = n ? mean / static_cast<double>(n) : 0.0;
        for (int j = 0; j < target.h; ++j) {
            for (int i = 0; i < target.w; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * target.w + i;
                const bool fluid = mask.fluid[k] != 0;
                out.at(t, j, i, kU) = fluid ? static_cast<float>(fields[kU][k]) : 0.0f;
                out.at(t, j, i, kV) = fluid ? static_cast<float>(fields[kV][k]) : 0.0f;
                out.at(t, j, i, kP) = fluid ? static_cast<float>(fields[kP][k] - mean) : 0.0f;
                out.at(t, j, i, kReHat) = traj.at(0, 0, 0, kReHat);
                out.at(t, j, i, kMask) = fluid ? 1.0f : 0.0f;
                out.at(t, j, i, kSdf) = static_cast<float>(sdf.values[k]);
            }
        }
    }
    return out;
}

}  // namespace trajio
}  // namespace nspregen
