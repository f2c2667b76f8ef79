#include "nspregen/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "nspregen/errors.hpp"
#include "nspregen/evaluator.hpp"
#include "nspregen/planner.hpp"
#include "nspregen/pool.hpp"
#include "nspregen/rng.hpp"
#include "nspregen/trajio.hpp"

namespace nspregen::cli {

namespace fs = std::filesystem;
using geometry::Axis;
using geometry::Tier;

namespace {

/// Bad invocation detected after parsing (exit 2).
class UsageError : public Error {
public:
    using Error::Error;
};

constexpr Tier kTiers[] = {Tier::Easy, Tier::Medium, Tier::Hard};

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

config::RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return config::RunConfig{};
    return config::load_config(path);
}

template <typename F>
auto parse_enum(const std::string& what, const std::string& s, F parse) {
    try {
        return parse(s);
    } catch (const Error&) {
        throw UsageError("unknown " + what + " '" + s + "'");
    }
}

std::vector<double> parse_doubles(const std::string& list, const char* what) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("bad ") + what + " value '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

std::vector<int> parse_ints(const std::string& list, const char* what) {
    std::vector<int> out;
    for (double d : parse_doubles(list, what)) {
        if (d != std::floor(d) || d < 0) throw UsageError(std::string("bad ") + what + " value " + fmt(d));
        out.push_back(static_cast<int>(d));
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& config_path, const std::string& manifest_path, const std::string& out_root,
                 int workers, bool held_out, std::ostream& out) {
    const config::RunConfig cfg = load_or_default(config_path);
    const planner::DatasetManifest m = planner::read_manifest(manifest_path);
    const fs::path root = out_root.empty() ? fs::path(cfg.out) : fs::path(out_root);

    planner::MaterializeOptions opt;
    opt.workers = workers > 0 ? workers : cfg.resolved_workers();
    opt.include_held_out = held_out;
    const auto res = planner::materialize_manifest(m, root, cfg.generation, opt);

    struct Row {
        int files = 0, simulated = 0, existing = 0, failed = 0;
        double seconds = 0.0;
    };
    std::map<std::string, Row> rows;
    for (const auto& f : res.manifest.files) {
        Row& r = rows[f.held_out ? "held_out" : std::string(geometry::to_string(f.tier))];
        ++r.files;
        if (f.status == "ok") {
            ++r.simulated;
            if (f.cost) r.seconds += f.cost->wall_seconds;
        } else if (f.status == "existing") {
            ++r.existing;
        } else {
            ++r.failed;
        }
    }
    out << "manifest " << m.name << " -> " << res.manifest_path.string() << '\n';
    out << std::left << std::setw(10) << "tier" << std::right << std::setw(8) << "files" << std::setw(11)
        << "simulated" << std::setw(10) << "existing" << std::setw(8) << "failed" << std::setw(14) << "sim_seconds"
        << '\n';
    for (const auto& [name, r] : rows) {
        out << std::left << std::setw(10) << name << std::right << std::setw(8) << r.files << std::setw(11)
            << r.simulated << std::setw(10) << r.existing << std::setw(8) << r.failed << std::setw(14)
            << fmt(r.seconds, 4) << '\n';
    }
    out << "total wall time " << fmt(res.wall_seconds, 4) << " s\n";
    if (res.simulated == 0 && res.failed == 0) {
        out << "nothing to simulate: all " << res.skipped << " files already present\n";
    }
    for (const auto& f : res.manifest.files) {
        if (f.status.rfind("failed", 0) == 0) out << f.path << ": " << f.status << '\n';
    }
    return res.failed > 0 ? kRuntimeFailure : kOk;
}

int cmd_profile(const std::string& config_path, const std::string& axis_name, int per_cell_n,
                const std::string& out_root, const std::string& cost_csv, const std::string& table_csv, int workers,
                std::ostream& out) {
    config::RunConfig cfg = load_or_default(config_path);
    const Axis axis = parse_enum("axis", axis_name, geometry::parse_axis);
    const int n = per_cell_n > 0 ? per_cell_n : cfg.per_cell_n;
    const fs::path root = out_root.empty() ? fs::path(cfg.out) : fs::path(out_root);
    const fs::path csv_path = cost_csv.empty() ? root / ("cost_" + axis_name + ".csv") : fs::path(cost_csv);
    const fs::path table_path = table_csv.empty() ? root / ("cost_table_" + axis_name + ".csv") : fs::path(table_csv);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    if (table_path.has_parent_path()) fs::create_directories(table_path.parent_path());

    const auto records = profile_axis(cfg, axis, n, workers > 0 ? workers : cfg.resolved_workers(), &out);
    cost::write_cost_csv(csv_path, records);
    const cost::CostTable table = cost::aggregate_costs(records);
    {
        std::ofstream t(table_path, std::ios::trunc);
        if (!t) throw IoError("cannot open " + table_path.string());
        cost::write_table_csv(t, table);
    }
    out << std::left << std::setw(8) << "tier" << std::right << std::setw(14) << "mean_seconds" << std::setw(14)
        << "std_seconds" << std::setw(5) << "n" << '\n';
    for (Tier t : kTiers) {
        if (const auto* s = table.find(axis, t)) {
            out << std::left << std::setw(8) << geometry::to_string(t) << std::right << std::setw(14)
                << fmt(s->mean_seconds, 4) << std::setw(14) << fmt(s->std_seconds, 4) << std::setw(5) << s->n << '\n';
        }
    }
    const auto rep = cost::check_monotonicity(table, axis);
    out << "monotone " << (rep.monotone ? "yes" : "no") << "  medium/easy " << fmt(rep.ratio_medium_easy, 4)
        << "  hard/medium " << fmt(rep.ratio_hard_medium, 4) << "  hard/easy " << fmt(rep.ratio_hard_easy, 4) << '\n';
    out << "cost csv " << csv_path.string() << "\ncost table " << table_path.string() << '\n';
    return records.size() == static_cast<std::size_t>(3 * n) ? kOk : kRuntimeFailure;
}

int cmd_plan(const std::string& cost_csv, const std::string& mode, const std::string& axis_name, int total_n,
             const std::string& alphas, const std::string& lower, const std::string& hard, double budget,
             const std::string& tier_name, const std::string& grid, int n_hard, std::uint64_t seed,
             const std::string& config_path, const std::string& out_dir, std::ostream& out) {
    if (!fs::exists(cost_csv)) throw UsageError("cost CSV " + cost_csv + " does not exist");
    const config::RunConfig cfg = load_or_default(config_path);
    const Axis axis = parse_enum("axis", axis_name, geometry::parse_axis);
    std::vector<cost::CostRecord> records;
    try {
        records = cost::read_cost_csv(fs::path(cost_csv));
    } catch (const SchemaError& e) {
        throw UsageError(e.what());
    }
    const cost::CostModel model = cost::fit_cost_model(cost::aggregate_costs(records), axis);
    const fs::path dir = out_dir.empty() ? fs::path(cfg.out) / "plans" : fs::path(out_dir);
    fs::create_directories(dir);

    std::vector<planner::DatasetManifest> manifests;
    if (mode == "alpha") {
        const auto grid_alphas = alphas.empty() ? planner::default_alpha_grid() : parse_doubles(alphas, "alpha");
        for (double a : grid_alphas) {
            if (!(a >= 0.0 && a <= 1.0)) throw UsageError("alpha " + fmt(a) + " outside [0, 1]");
        }
        if (total_n < 1) throw UsageError("--n must be at least 1");
        manifests = planner::alpha_sweep_manifest(total_n, grid_alphas, parse_enum("tier", lower, geometry::parse_tier),
                                                  parse_enum("tier", hard, geometry::parse_tier), axis, seed,
                                                  cfg.catalog, cfg.kind);
        planner::check_held_out_disjoint(manifests);
    } else if (mode == "budget") {
        if (!(budget > 0.0)) throw UsageError("budget mode needs --budget seconds");
        const auto counts = grid.empty() ? planner::default_augmentation_grid() : parse_ints(grid, "grid");
        const auto plan = planner::budget_augmentation_plan(
            model, budget, parse_enum("tier", tier_name, geometry::parse_tier), counts, n_hard);
        for (int g : plan.feasible_counts) {
            manifests.push_back(planner::budget_manifest(plan, g, axis, seed, cfg.catalog, cfg.kind));
        }
        planner::check_held_out_disjoint(manifests);
        out << "hard seed " << plan.n_hard_seed << " x " << fmt(model.at(Tier::Hard)) << " s = "
            << fmt(plan.seed_cost) << " s of " << fmt(budget) << " s budget; " << plan.feasible_counts.size() << " of "
            << plan.grid.size() << " grid counts feasible (binding: " << plan.binding << ")\n";
    } else {
        throw UsageError("--mode must be alpha or budget");
    }

    std::ofstream savings(dir / "savings.csv", std::ios::trunc);
    if (!savings) throw IoError("cannot write " + (dir / "savings.csv").string());
    savings << "manifest,easy,medium,hard,total,cost_seconds,reference_cost_seconds,savings_ratio\n";
    out << std::left << std::setw(22) << "manifest" << std::right << std::setw(7) << "easy" << std::setw(7)
        << "medium" << std::setw(7) << "hard" << std::setw(14) << "cost_seconds" << std::setw(10) << "savings"
        << '\n';
    for (const auto& m : manifests) {
        planner::write_manifest(m, dir / (m.name + ".json"));
        const auto ref = planner::all_hard_reference(m, cfg.catalog);
        const double c = planner::total_cost(m, model);
        const double rc = planner::total_cost(ref, model);
        const double ratio = planner::compute_savings_ratio(ref, m, model);
        char line[256];
        std::snprintf(line, sizeof(line), "%s,%d,%d,%d,%d,%.17g,%.17g,%.17g\n", m.name.c_str(), m.count(Tier::Easy),
                      m.count(Tier::Medium), m.count(Tier::Hard), m.total_count(), c, rc, ratio);
        savings << line;
        out << std::left << std::setw(22) << m.name << std::right << std::setw(7) << m.count(Tier::Easy)
            << std::setw(7) << m.count(Tier::Medium) << std::setw(7) << m.count(Tier::Hard) << std::setw(14)
            << fmt(c, 6) << std::setw(10) << fmt(ratio, 4) << '\n';
    }
    out << manifests.size() << " manifests written to " << dir.string() << '\n';
    return kOk;
}

int cmd_eval(const std::string& pred, const std::string& truth, const std::string& channels,
             const std::string& report, std::ostream& out) {
    std::vector<int> ch;
    try {
        ch = evaluator::parse_channels(channels);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const auto r = evaluator::evaluate_directories(pred, truth, ch);
    const std::string text = evaluator::to_json(r).dump(2);
    if (!report.empty()) {
        std::ofstream f(report, std::ios::trunc);
        if (!f) throw IoError("cannot write " + report);
        f << text << '\n';
    }
    out << text << '\n';
    return kOk;
}

void rgb(double t, bool diverging, int& r, int& g, int& b) {
    t = std::clamp(t, 0.0, 1.0);
    if (diverging) {
        // blue - white - red
        if (t < 0.5) {
            const double s = t / 0.5;
            r = static_cast<int>(59 + s * (255 - 59));
            g = static_cast<int>(76 + s * (255 - 76));
            b = static_cast<int>(192 + s * (255 - 192));
        } else {
            const double s = (t - 0.5) / 0.5;
            r = static_cast<int>(255 + s * (180 - 255));
            g = static_cast<int>(255 + s * (4 - 255));
            b = static_cast<int>(255 + s * (38 - 255));
        }
    } else {
        // dark blue - yellow
        r = static_cast<int>(68 + t * (253 - 68));
        g = static_cast<int>(1 + t * (231 - 1));
        b = static_cast<int>(84 + t * (37 - 84));
    }
}

void write_svg(std::ostream& os, const std::vector<double>& values, int H, int W) {
    const int px = std::max(1, 512 / std::max(H, W));
    double lo = values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
    double hi = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    const bool diverging = lo < 0.0 && hi > 0.0;
    if (diverging) {
        hi = std::max(-lo, hi);
        lo = -hi;
    }
    const double span = hi > lo ? hi - lo : 1.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W * px << "\" height=\"" << H * px
       << "\" shape-rendering=\"crispEdges\">\n";
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            int r, g, b;
            rgb((values[static_cast<std::size_t>(j) * W + i] - lo) / span, diverging, r, g, b);
            os << "<rect x=\"" << i * px << "\" y=\"" << (H - 1 - j) * px << "\" width=\"" << px << "\" height=\""
               << px << "\" fill=\"rgb(" << r << ',' << g << ',' << b << ")\"/>\n";
        }
    }
    os << "</svg>\n";
}

int cmd_inspect(const std::string& path, int frame, const std::string& channel, const std::string& csv,
                const std::string& svg, std::ostream& out) {
    const Trajectory traj = trajio::read_trajectory(path);
    if (frame < 0 || frame >= traj.T) {
        throw UsageError("frame " + std::to_string(frame) + " outside [0, " + std::to_string(traj.T - 1) + "]");
    }
    std::vector<double> values;
    if (channel == "vorticity") {
        values = vorticity(traj, frame);
    } else {
        auto it = std::find(kChannelNames.begin(), kChannelNames.end(), channel);
        if (it == kChannelNames.end()) throw UsageError("unknown channel '" + channel + "'");
        values = traj.channel(frame, static_cast<int>(it - kChannelNames.begin()));
    }
    const double dx = traj.meta.domain.lx / traj.W;
    const double dy = traj.meta.domain.ly / traj.H;

    if (!svg.empty()) {
        std::ofstream f(svg, std::ios::trunc);
        if (!f) throw IoError("cannot write " + svg);
        write_svg(f, values, traj.H, traj.W);
    }
    if (!csv.empty() || svg.empty()) {
        std::ofstream file;
        std::ostream* os = &out;
        if (!csv.empty() && csv != "-") {
            file.open(csv, std::ios::trunc);
            if (!file) throw IoError("cannot write " + csv);
            os = &file;
        }
        *os << "i,j,x,y," << channel << '\n';
        char line[128];
        for (int j = 0; j < traj.H; ++j) {
            for (int i = 0; i < traj.W; ++i) {
                std::snprintf(line, sizeof(line), "%d,%d,%.9g,%.9g,%.9g\n", i, j, (i + 0.5) * dx, (j + 0.5) * dy,
                              values[static_cast<std::size_t>(j) * traj.W + i]);
                *os << line;
            }
        }
    }
    return kOk;
}

int cmd_convert(const std::string& path, const std::string& raw, std::ostream& out) {
    const Trajectory traj = trajio::read_trajectory(path);
    fs::path payload(raw);
    fs::path sidecar = payload;
    sidecar.replace_extension(".json");
    if (sidecar == payload) sidecar += ".json";
    trajio::write_raw(traj, payload, sidecar);
    out << payload.string() << " (" << traj.T << "x" << traj.H << "x" << traj.W << "x" << traj.C
        << " float32 little-endian)\n"
        << sidecar.string() << '\n';
    return kOk;
}

int cmd_config(bool dump_defaults, const std::string& check, std::ostream& out) {
    if (dump_defaults) {
        out << "# nspregen run configuration\n" << config::dump_config(config::RunConfig{});
        return kOk;
    }
    if (!check.empty()) {
        out << config::dump_config(config::load_config(check));
        return kOk;
    }
    throw UsageError("config needs --dump-defaults or --check FILE");
}

}  // namespace

std::vector<cost::CostRecord> profile_axis(const config::RunConfig& cfg, Axis axis, int per_cell_n, int workers,
                                           std::ostream* log) {
    if (per_cell_n < 1) throw InvalidArgument("per_cell_n must be at least 1");
    struct Job {
        Tier tier;
        int index;
    };
    std::vector<Job> jobs;
    for (int k = 0; k < per_cell_n; ++k) {
        for (Tier t : kTiers) jobs.push_back({t, k});
    }
    const std::uint64_t stream = derive_seed(cfg.seed, "profile_" + std::string(geometry::to_string(axis)));
    std::vector<std::optional<cost::CostRecord>> slots(jobs.size());
    std::mutex mu;
    parallel_for(jobs.size(), workers, [&](std::size_t q) {
        const Job& job = jobs[q];
        const planner::TierEntry e = planner::tier_spec(axis, job.tier, cfg.catalog);
        const std::uint64_t seed = derive_seed(stream, static_cast<std::uint64_t>(job.index));
        try {
            const planner::CaseSpec spec = planner::draw_case(e, axis, seed, cfg.generation);
            solver::CaseSetup c = planner::setup_case(spec, cfg.kind, cfg.generation);
            c.labels.sim_id = derive_seed(seed, geometry::to_string(job.tier));
            c.export_grid = c.mask.dims;  // profiling measures the solver only
            const auto run = solver::run_simulation(c);
            slots[q] = run.cost;
        } catch (const std::exception& ex) {
            std::lock_guard<std::mutex> lock(mu);
            if (log) *log << "profile " << geometry::to_string(job.tier) << " #" << job.index << " failed: " << ex.what() << '\n';
        }
    });
    std::vector<cost::CostRecord> out;
    for (Tier t : kTiers) {
        for (std::size_t q = 0; q < jobs.size(); ++q) {
            if (jobs[q].tier == t && slots[q]) out.push_back(*slots[q]);
        }
    }
    return out;
}

std::vector<double> vorticity(const Trajectory& traj, int frame) {
    const int H = traj.H;
    const int W = traj.W;
    const double dx = traj.meta.domain.lx / W;
    const double dy = traj.meta.domain.ly / H;
    auto d = [&](int c, int i0, int j0, int i1, int j1, double h) {
        return (traj.at(frame, j1, i1, c) - static_cast<double>(traj.at(frame, j0, i0, c))) / h;
    };
    std::vector<double> w(static_cast<std::size_t>(H) * W);
    for (int j = 0; j < H; ++j) {
        for (int i = 0; i < W; ++i) {
            const int il = std::max(i - 1, 0), ir = std::min(i + 1, W - 1);
            const int jb = std::max(j - 1, 0), jt = std::min(j + 1, H - 1);
            const double dvdx = W > 1 ? d(kV, il, j, ir, j, (ir - il) * dx) : 0.0;
            const double dudy = H > 1 ? d(kU, i, jb, i, jt, (jt - jb) * dy) : 0.0;
            w[static_cast<std::size_t>(j) * W + i] = dvdx - dudy;
        }
    }
    return w;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Difficulty-graded Navier-Stokes dataset generator"};
    app.name("nspregen");
    app.require_subcommand(1);

    std::string config_path, out_root;
    int workers = 0;

    auto* gen = app.add_subcommand("generate", "simulate every example of a manifest");
    std::string manifest_path;
    bool held_out = false;
    gen->add_option("--manifest", manifest_path, "manifest JSON")->required();
    gen->add_option("--config", config_path, "run configuration");
    gen->add_option("--out", out_root, "output root (overrides the config)");
    gen->add_option("--workers", workers, "parallel simulations");
    gen->add_flag("--held-out", held_out, "also simulate the held-out set");

    auto* prof = app.add_subcommand("profile", "measure generation cost per difficulty tier");
    std::string axis_name, cost_csv, table_csv;
    int per_cell_n = 0;
    prof->add_option("--axis", axis_name, "geometry, physics or combined")->required();
    prof->add_option("--per-cell-n", per_cell_n, "simulations per tier");
    prof->add_option("--config", config_path, "run configuration");
    prof->add_option("--out", out_root, "output root");
    prof->add_option("--cost-csv", cost_csv, "per-run cost CSV path");
    prof->add_option("--table", table_csv, "aggregated cost table CSV path");
    prof->add_option("--workers", workers, "parallel simulations");

    auto* plan = app.add_subcommand("plan", "write mixture manifests and savings ratios");
    std::string mode, plan_axis = "physics", alphas, lower = "easy", hard = "hard", tier = "easy", grid, plan_dir;
    int total_n = 800, n_hard = planner::kHardSeedCount;
    double budget = 0.0;
    std::uint64_t seed = 0;
    plan->add_option("--cost-csv", cost_csv, "profiled cost CSV")->required();
    plan->add_option("--mode", mode, "alpha or budget")->required();
    plan->add_option("--axis", plan_axis, "difficulty axis");
    plan->add_option("--n", total_n, "training set size (alpha mode)");
    plan->add_option("--alphas", alphas, "comma-separated hard fractions");
    plan->add_option("--lower", lower, "lower tier (alpha mode)");
    plan->add_option("--hard", hard, "hard tier (alpha mode)");
    plan->add_option("--budget", budget, "generation budget in seconds (budget mode)");
    plan->add_option("--tier", tier, "augmentation tier (budget mode)");
    plan->add_option("--grid", grid, "comma-separated augmentation counts");
    plan->add_option("--n-hard", n_hard, "hard seed examples (budget mode)");
    plan->add_option("--seed", seed, "base seed");
    plan->add_option("--config", config_path, "run configuration");
    plan->add_option("--out", plan_dir, "directory for manifests");

    auto* ev = app.add_subcommand("eval", "score predictions against ground truth");
    std::string pred_dir, truth_dir, channels = "u,v,p", report;
    ev->add_option("--pred", pred_dir, "directory of predicted NST1 files")->required();
    ev->add_option("--truth", truth_dir, "directory of ground-truth NST1 files")->required();
    ev->add_option("--channels", channels, "comma-separated channels");
    ev->add_option("--report", report, "also write the JSON report here");

    auto* insp = app.add_subcommand("inspect", "export one field of one frame");
    std::string insp_path, insp_channel = "u", csv_path, svg_path;
    int frame = 0;
    insp->add_option("file", insp_path, "NST1 file")->required();
    insp->add_option("--frame", frame, "frame index");
    insp->add_option("--channel", insp_channel, "u, v, p, re_hat, mask, sdf or vorticity");
    insp->add_option("--csv", csv_path, "CSV output (- for stdout)");
    insp->add_option("--svg", svg_path, "SVG heat map output");

    auto* conv = app.add_subcommand("convert", "export a headerless payload with a JSON sidecar");
    std::string conv_path, raw_path;
    conv->add_option("file", conv_path, "NST1 file")->required();
    conv->add_option("--raw", raw_path, "payload output path")->required();

    auto* cfg = app.add_subcommand("config", "print or check run configurations");
    bool dump_defaults = false;
    std::string check_path;
    cfg->add_flag("--dump-defaults", dump_defaults, "print every key with its default");
    cfg->add_option("--check", check_path, "validate a config file and print it in full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    }

    try {
        if (*gen) return cmd_generate(config_path, manifest_path, out_root, workers, held_out, out);
        if (*prof) return cmd_profile(config_path, axis_name, per_cell_n, out_root, cost_csv, table_csv, workers, out);
        if (*plan) {
            return cmd_plan(cost_csv, mode, plan_axis, total_n, alphas, lower, hard, budget, tier, grid, n_hard, seed,
                            config_path, plan_dir, out);
        }
        if (*ev) return cmd_eval(pred_dir, truth_dir, channels, report, out);
        if (*insp) return cmd_inspect(insp_path, frame, insp_channel, csv_path, svg_path, out);
        if (*conv) return cmd_convert(conv_path, raw_path, out);
        if (*cfg) return cmd_config(dump_defaults, check_path, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageError;
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return kUsageError;
}

}  // namespace nspregen::cli
