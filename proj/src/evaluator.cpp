#include "nspregen/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "nspregen/errors.hpp"
#include "nspregen/trajio.hpp"

namespace nspregen::evaluator {

namespace {

struct Sums {
    std::vector<double> num;  // per scored channel
    std::vector<double> den;
};

struct Pair {
    std::uint64_t id;
    const Trajectory* pred;
    const Trajectory* truth;
};

std::vector<Pair> pair_up(const std::vector<Trajectory>& pred, const std::vector<Trajectory>& truth) {
    std::map<std::uint64_t, const Trajectory*> by_id;
    for (const auto& t : truth) {
        if (!by_id.emplace(t.meta.sim_id, &t).second) {
            throw UnpairedTrajectory("duplicate ground-truth id " + std::to_string(t.meta.sim_id));
        }
    }
    std::vector<Pair> pairs;
    std::set<std::uint64_t> seen;
    for (const auto& p : pred) {
        auto it = by_id.find(p.meta.sim_id);
        if (it == by_id.end()) {
            throw UnpairedTrajectory("prediction " + std::to_string(p.meta.sim_id) + " has no ground truth");
        }
        if (!seen.insert(p.meta.sim_id).second) {
            throw UnpairedTrajectory("duplicate prediction id " + std::to_string(p.meta.sim_id));
        }
        pairs.push_back({p.meta.sim_id, &p, it->second});
    }
    if (pairs.size() != truth.size()) {
        for (const auto& t : truth) {
            if (!seen.count(t.meta.sim_id)) {
                throw UnpairedTrajectory("ground truth " + std::to_string(t.meta.sim_id) + " has no prediction");
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.id < b.id; });
    return pairs;
}

void check_channels(const std::vector<int>& channels) {
    if (channels.empty()) throw InvalidArgument("no channels selected");
    for (int c : channels) {
        if (c < 0 || c >= kChannels) throw InvalidArgument("channel index out of range");
    }
}

Sums pair_sums(const Pair& p, const std::vector<int>& channels) {
    const Trajectory& a = *p.pred;
    const Trajectory& b = *p.truth;
    if (a.T != b.T || a.H != b.H || a.W != b.W || a.C != b.C || a.data.size() != b.data.size()) {
        throw ShapeMismatch("trajectory " + std::to_string(p.id) + " shapes differ");
    }
    for (int c : channels) {
        if (c >= b.C) throw ShapeMismatch("trajectory has no channel " + std::to_string(c));
    }
    Sums s{std::vector<double>(channels.size(), 0.0), std::vector<double>(channels.size(), 0.0)};
    const std::size_t cells = static_cast<std::size_t>(b.T) * b.H * b.W;
    for (std::size_t k = 0; k < cells; ++k) {
        const std::size_t base = k * static_cast<std::size_t>(b.C);
        for (std::size_t q = 0; q < channels.size(); ++q) {
            const double y = b.data[base + channels[q]];
            const double yh = a.data[base + channels[q]];
            s.num[q] += std::abs(y - yh);
            s.den[q] += std::abs(y);
        }
    }
    return s;
}

}  // namespace

EvalReport nmae(const std::vector<Trajectory>& pred, const std::vector<Trajectory>& truth,
                const std::vector<int>& channels) {
    check_channels(channels);
    const auto pairs = pair_up(pred, truth);
    if (pairs.empty()) throw ZeroDenominator("no trajectories to score");

    EvalReport r;
    r.channels = channels;
    r.N = static_cast<int>(pairs.size());
    r.T = pairs.front().truth->T;
    std::vector<double> ch_num(channels.size(), 0.0);
    std::vector<double> ch_den(channels.size(), 0.0);
    for (const Pair& p : pairs) {
        const Sums s = pair_sums(p, channels);
        TrajectoryPartial part;
        part.sim_id = p.id;
        for (std::size_t q = 0; q < channels.size(); ++q) {
            part.numerator += s.num[q];
            part.denominator += s.den[q];
            ch_num[q] += s.num[q];
            ch_den[q] += s.den[q];
        }
        r.per_trajectory.push_back(part);
    }
    // Ordered reduction of the stored partials.
    for (const auto& part : r.per_trajectory) {
        r.numerator += part.numerator;
        r.denominator += part.denominator;
    }
    if (r.denominator == 0.0) throw ZeroDenominator("ground truth is zero on every scored channel");
    r.nmae = r.numerator / r.denominator;
    for (std::size_t q = 0; q < channels.size(); ++q) {
        const std::string name(kChannelNames[channels[q]]);
        if (ch_den[q] > 0.0) {
            r.per_channel[name] = ch_num[q] / ch_den[q];
        } else {
            r.per_channel[name] = ch_num[q] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
    }
    return r;
}

std::map<std::string, double> per_channel_errors(const std::vector<Trajectory>& pred,
                                                 const std::vector<Trajectory>& truth,
                                                 const std::vector<int>& channels) {
    check_channels(channels);
    const auto pairs = pair_up(pred, truth);
    std::vector<double> num(channels.size(), 0.0);
    std::vector<double> den(channels.size(), 0.0);
    for (const Pair& p : pairs) {
        const Sums s = pair_sums(p, channels);
        for (std::size_t q = 0; q < channels.size(); ++q) {
            num[q] += s.num[q];
            den[q] += s.den[q];
        }
    }
    std::map<std::string, double> out;
    for (std::size_t q = 0; q < channels.size(); ++q) {
        const std::string name(kChannelNames[channels[q]]);
        if (den[q] > 0.0) {
            out[name] = num[q] / den[q];
        } else {
            out[name] = num[q] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

std::vector<int> parse_channels(const std::string& list) {
    std::vector<int> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        item = item.substr(b, item.find_last_not_of(" \t") - b + 1);
        auto it = std::find(kChannelNames.begin(), kChannelNames.end(), item);
        if (it == kChannelNames.end()) throw InvalidArgument("unknown channel '" + item + "'");
        const int c = static_cast<int>(it - kChannelNames.begin());
        if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    if (out.empty()) throw InvalidArgument("no channels selected");
    return out;
}

namespace {

std::vector<Trajectory> load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> paths;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".nst") paths.push_back(e.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<Trajectory> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(trajio::read_trajectory(p));
    return out;
}

}  // namespace

EvalReport evaluate_directories(const std::filesystem::path& pred_dir, const std::filesystem::path& truth_dir,
                                const std::vector<int>& channels) {
    return nmae(load_dir(pred_dir), load_dir(truth_dir), channels);
}

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json channels = nlohmann::json::array();
    for (int c : r.channels) channels.push_back(std::string(kChannelNames[c]));
    nlohmann::json per_channel = nlohmann::json::object();
    for (const auto& [name, v] : r.per_channel) {
        per_channel[name] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
    }
    nlohmann::json per_traj = nlohmann::json::array();
    for (const auto& p : r.per_trajectory) {
        per_traj.push_back({{"sim_id", p.sim_id}, {"numerator", p.numerator}, {"denominator", p.denominator}});
    }
    return {{"nmae", r.nmae},
            {"numerator", r.numerator},
            {"denominator", r.denominator},
            {"channels", channels},
            {"per_channel", per_channel},
            {"per_trajectory", per_traj},
            {"N", r.N},
            {"T", r.T}};
}

}  // namespace nspregen::evaluator
