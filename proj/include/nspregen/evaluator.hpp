#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nspregen/trajectory.hpp"

namespace nspregen::evaluator {

/// Physical channels scored by default.
inline const std::vector<int> kDefaultChannels = {kU, kV, kP};

struct TrajectoryPartial {
    std::uint64_t sim_id = 0;
    double numerator = 0.0;    ///< sum |y - y_hat| over frames, cells, channels
    double denominator = 0.0;  ///< sum |y|
};

struct EvalReport {
    double nmae = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    std::vector<int> channels;
    std::map<std::string, double> per_channel;
    std::vector<TrajectoryPartial> per_trajectory;  ///< sorted by sim_id
    int N = 0;
    int T = 0;
};

/// Global relative L1 error: sum over trajectories, frames, cells and
/// `channels` of |y - y_hat|, divided by the same sum of |y|.
///
/// Pairs are matched by sim_id. Throws UnpairedTrajectory, ShapeMismatch, or
/// ZeroDenominator when the truth is identically zero on the scored channels.
EvalReport nmae(const std::vector<Trajectory>& pred, const std::vector<Trajectory>& truth,
                const std::vector<int>& channels = kDefaultChannels);

/// The same ratio channel by channel. A channel whose truth is all zero
/// reports 0 when the prediction matches and +inf otherwise.
std::map<std::string, double> per_channel_errors(const std::vector<Trajectory>& pred,
                                                 const std::vector<Trajectory>& truth,
                                                 const std::vector<int>& channels = kDefaultChannels);

/// Parses "u,v,p" style lists; throws InvalidArgument on unknown names.
std::vector<int> parse_channels(const std::string& list);

/// Loads every *.nst file of both directories and scores them.
EvalReport evaluate_directories(const std::filesystem::path& pred_dir,
                                const std::filesystem::path& truth_dir,
                                const std::vector<int>& channels = kDefaultChannels);

nlohmann::json to_json(const EvalReport& r);

}  // namespace nspregen::evaluator
