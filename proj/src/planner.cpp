#include "nspregen/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "nspregen/errors.hpp"
#include "nspregen/pool.hpp"
#include "nspregen/rng.hpp"
#include "nspregen/trajio.hpp"

namespace nspregen::planner {

using nlohmann::json;

const physics::ReBand& TierCatalog::re(Tier t) const {
    switch (t) {
        case Tier::Easy: return re_easy;
        case Tier::Medium: return re_medium;
        case Tier::Hard: return re_hard;
    }
    return re_easy;
}

const ObstacleRange& TierCatalog::obstacles(Tier t) const {
    switch (t) {
        case Tier::Easy: return obs_easy;
        case Tier::Medium: return obs_medium;
        case Tier::Hard: return obs_hard;
    }
    return obs_easy;
}

TierEntry tier_spec(Axis axis, Tier tier, const TierCatalog& catalog) {
    TierEntry e;
    e.tier = tier;
    switch (axis) {
        case Axis::Geometry:
            e.re_band = catalog.geometry_re;
            e.obstacles = catalog.obstacles(tier);
            break;
        case Axis::Physics:
            e.re_band = catalog.re(tier);
            e.obstacles = catalog.obs_easy;
            e.obstacles.min = 0;
            e.obstacles.max = 0;
            break;
        case Axis::Combined:
            e.re_band = catalog.re(tier);
            e.obstacles = catalog.obstacles(tier);
            break;
    }
    return e;
}

int DatasetManifest::total_count() const {
    int n = 0;
    for (const auto& e : entries) n += e.count;
    return n;
}

int DatasetManifest::count(Tier t) const {
    int n = 0;
    for (const auto& e : entries) {
        if (e.tier == t) n += e.count;
    }
    return n;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json band_json(const physics::ReBand& b) {
    return {{"lo", b.lo}, {"hi", b.hi}, {"mean", b.mean}, {"sigma", b.sigma}};
}

json obstacles_json(const ObstacleRange& o) {
    return {{"min", o.min}, {"max", o.max}, {"size", {o.size_lo, o.size_hi}}};
}

json cost_json(const cost::CostRecord& r) {
    return {{"sim_id", r.sim_id},
            {"axis", std::string(geometry::to_string(r.axis))},
            {"tier", std::string(geometry::to_string(r.tier))},
            {"obstacles", r.obstacle_count},
            {"re", r.re},
            {"wall_seconds", r.wall_seconds},
            {"steps", r.steps},
            {"cg_iters", r.cg_iters_total},
            {"host", r.host}};
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError("missing field " + where + "." + key);
    return j.at(key);
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
    const json& v = field(j, key, where);
    try {
        if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw SchemaError("");
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw SchemaError("");
        } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
            if (!v.is_number_integer()) throw SchemaError("");
            if constexpr (std::is_unsigned_v<T>) {
                if (!v.is_number_unsigned()) throw SchemaError("");
            }
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw SchemaError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw SchemaError("field " + where + "." + key + " has the wrong type");
    }
}

physics::ReBand band_from(const json& j, const std::string& where) {
    physics::ReBand b;
    b.lo = get<double>(j, "lo", where);
    b.hi = get<double>(j, "hi", where);
    b.mean = get<double>(j, "mean", where);
    b.sigma = get<double>(j, "sigma", where);
    try {
        b.validate();
    } catch (const Error& e) {
        throw SchemaError("field " + where + " is not a valid band: " + e.what());
    }
    return b;
}

ObstacleRange obstacles_from(const json& j, const std::string& where) {
    ObstacleRange o;
    o.min = get<int>(j, "min", where);
    o.max = get<int>(j, "max", where);
    const json& size = field(j, "size", where);
    if (!size.is_array() || size.size() != 2 || !size[0].is_number() || !size[1].is_number()) {
        throw SchemaError("field " + where + ".size must be [lo, hi]");
    }
    o.size_lo = size[0].get<double>();
    o.size_hi = size[1].get<double>();
    if (o.min < 0 || o.max > 10 || o.min > o.max) {
        throw SchemaError("field " + where + " must satisfy 0 <= min <= max <= 10");
    }
    if (!(o.size_lo > 0.0 && o.size_lo <= o.size_hi)) {
        throw SchemaError("field " + where + ".size must satisfy 0 < lo <= hi");
    }
    return o;
}

template <typename F>
auto enum_from(const json& j, const char* key, const std::string& where, F parse) {
    const auto s = get<std::string>(j, key, where);
    try {
        return parse(s);
    } catch (const Error&) {
        throw SchemaError("field " + where + "." + key + " has unknown value '" + s + "'");
    }
}

TierEntry entry_from(const json& j, const std::string& where, bool with_count) {
    TierEntry e;
    e.tier = enum_from(j, "tier", where, geometry::parse_tier);
    if (with_count) {
        e.count = get<int>(j, "count", where);
        if (e.count < 0) throw SchemaError("field " + where + ".count must be non-negative");
        e.base_seed = get<std::uint64_t>(j, "base_seed", where);
    }
    e.re_band = band_from(field(j, "re_band", where), where + ".re_band");
    e.obstacles = obstacles_from(field(j, "obstacles", where), where + ".obstacles");
    return e;
}

}  // namespace

json to_json(const DatasetManifest& m) {
    json entries = json::array();
    for (const auto& e : m.entries) {
        entries.push_back({{"tier", std::string(geometry::to_string(e.tier))},
                           {"count", e.count},
                           {"re_band", band_json(e.re_band)},
                           {"obstacles", obstacles_json(e.obstacles)},
                           {"base_seed", e.base_seed}});
    }
    json files = json::array();
    for (const auto& f : m.files) {
        files.push_back({{"path", f.path},
                         {"tier", std::string(geometry::to_string(f.tier))},
                         {"index", f.index},
                         {"held_out", f.held_out},
                         {"seed", f.seed},
                         {"re", f.re},
                         {"obstacles", f.obstacles},
                         {"status", f.status},
                         {"cost", f.cost ? cost_json(*f.cost) : json(nullptr)}});
    }
    return {{"version", m.version},
            {"name", m.name},
            {"axis", std::string(geometry::to_string(m.axis))},
            {"kind", std::string(physics::to_string(m.kind))},
            {"entries", entries},
            {"held_out",
             {{"count", m.held_out.count},
              {"seed", m.held_out.seed},
              {"tier", std::string(geometry::to_string(m.held_out.spec.tier))},
              {"re_band", band_json(m.held_out.spec.re_band)},
              {"obstacles", obstacles_json(m.held_out.spec.obstacles)}}},
            {"files", files}};
}

DatasetManifest manifest_from_json(const json& j) {
    const std::string root = "manifest";
    if (!j.is_object()) throw SchemaError("manifest must be a JSON object");
    DatasetManifest m;
    m.version = get<int>(j, "version", root);
    if (m.version != kManifestVersion) {
        throw SchemaError("field manifest.version is " + std::to_string(m.version) + ", expected " +
                          std::to_string(kManifestVersion));
    }
    m.name = get<std::string>(j, "name", root);
    if (m.name.empty() || m.name.find('/') != std::string::npos || m.name == "." || m.name == "..") {
        throw SchemaError("field manifest.name must be a plain directory name");
    }
    m.axis = enum_from(j, "axis", root, geometry::parse_axis);
    m.kind = j.contains("kind") ? enum_from(j, "kind", root, physics::parse_kind) : physics::FlowKind::FPO;

    const json& entries = field(j, "entries", root);
    if (!entries.is_array()) throw SchemaError("field manifest.entries must be an array");
    for (std::size_t k = 0; k < entries.size(); ++k) {
        m.entries.push_back(entry_from(entries[k], root + ".entries[" + std::to_string(k) + "]", true));
    }
    if (m.total_count() <= 0) throw SchemaError("field manifest.entries has no training examples");

    const json& ho = field(j, "held_out", root);
    const std::string hw = root + ".held_out";
    m.held_out.count = get<int>(ho, "count", hw);
    if (m.held_out.count < 0) throw SchemaError("field " + hw + ".count must be non-negative");
    m.held_out.seed = get<std::uint64_t>(ho, "seed", hw);
    m.held_out.spec = entry_from(ho, hw, false);

    if (j.contains("files")) {
        const json& files = j.at("files");
        if (!files.is_array()) throw SchemaError("field manifest.files must be an array");
        for (std::size_t k = 0; k < files.size(); ++k) {
            const std::string w = root + ".files[" + std::to_string(k) + "]";
            const json& fj = files[k];
            FileRef f;
            f.path = get<std::string>(fj, "path", w);
            f.tier = enum_from(fj, "tier", w, geometry::parse_tier);
            f.index = get<int>(fj, "index", w);
            f.held_out = get<bool>(fj, "held_out", w);
            f.seed = get<std::uint64_t>(fj, "seed", w);
            f.re = get<double>(fj, "re", w);
            f.obstacles = get<int>(fj, "obstacles", w);
            f.status = get<std::string>(fj, "status", w);
            if (fj.contains("cost") && !fj.at("cost").is_null()) {
                const json& cj = fj.at("cost");
                const std::string cw = w + ".cost";
                cost::CostRecord r;
                r.sim_id = get<std::uint64_t>(cj, "sim_id", cw);
                r.axis = enum_from(cj, "axis", cw, geometry::parse_axis);
                r.tier = enum_from(cj, "tier", cw, geometry::parse_tier);
                r.obstacle_count = get<int>(cj, "obstacles", cw);
                r.re = get<double>(cj, "re", cw);
                r.wall_seconds = get<double>(cj, "wall_seconds", cw);
                r.steps = get<std::int64_t>(cj, "steps", cw);
                r.cg_iters_total = get<std::int64_t>(cj, "cg_iters", cw);
                r.host = get<std::string>(cj, "host", cw);
                f.cost = r;
            }
            m.files.push_back(std::move(f));
        }
    }
    return m;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + " is not valid JSON: " + e.what());
    }
    return manifest_from_json(j);
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << to_json(m).dump(2) << '\n';
        if (!out) throw IoError("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

// ---------------------------------------------------------------------------
// Composition

int hard_count(int total_n, double alpha) {
    if (total_n < 1) throw InvalidArgument("total_n must be at least 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in [0, 1]");
    return std::min(total_n, static_cast<int>(std::floor(alpha * total_n + 0.5)));
}

std::vector<double> default_alpha_grid() { return {0.0, 0.05, 0.10, 0.25, 0.50, 0.75, 1.0}; }

namespace {

std::string alpha_name(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "alpha_%.2f", alpha);
    return buf;
}

HeldOut make_held_out(Axis axis, Tier hard_tier, std::uint64_t base_seed, const TierCatalog& catalog) {
    HeldOut h;
    h.count = kHeldOutCount;
    h.seed = derive_seed(base_seed, "held_out");
    h.spec = tier_spec(axis, hard_tier, catalog);
    return h;
}

}  // namespace

std::vector<DatasetManifest> alpha_sweep_manifest(int total_n, const std::vector<double>& alphas,
                                                  Tier lower_tier, Tier hard_tier, Axis axis,
                                                  std::uint64_t base_seed, const TierCatalog& catalog,
                                                  physics::FlowKind kind) {
    if (total_n < 1) throw InvalidArgument("total_n must be at least 1");
    if (lower_tier == hard_tier) throw InvalidArgument("lower and hard tiers must differ");
    const HeldOut held_out = make_held_out(axis, hard_tier, base_seed, catalog);

    std::vector<DatasetManifest> out;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        const int n_hard = hard_count(total_n, alphas[a]);
        const std::uint64_t stream = derive_seed(derive_seed(base_seed, "alpha"), a);

        DatasetManifest m;
        m.name = alpha_name(alphas[a]);
        m.axis = axis;
        m.kind = kind;
        TierEntry lower = tier_spec(axis, lower_tier, catalog);
        lower.count = total_n - n_hard;
        lower.base_seed = derive_seed(stream, geometry::to_string(lower_tier));
        TierEntry hard = tier_spec(axis, hard_tier, catalog);
        hard.count = n_hard;
        hard.base_seed = derive_seed(stream, geometry::to_string(hard_tier));
        m.entries = {lower, hard};
        m.held_out = held_out;
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<int> default_augmentation_grid() {
    std::vector<int> g;
    for (int v = 1; v <= 2048; v *= 2) g.push_back(v);
    g.push_back(3200);
    return g;
}

BudgetPlan budget_augmentation_plan(const cost::CostModel& model, double budget_seconds, Tier tier,
                                    const std::vector<int>& grid, int n_hard_seed) {
    if (grid.empty()) throw InvalidArgument("augmentation grid is empty");
    if (n_hard_seed < 0) throw InvalidArgument("hard seed count must be non-negative");
    BudgetPlan plan;
    plan.n_hard_seed = n_hard_seed;
    plan.augmentation_tier = tier;
    plan.grid = grid;
    plan.budget_seconds = budget_seconds;
    plan.seed_cost = n_hard_seed * model.at(Tier::Hard);
    plan.per_example = model.at(tier);
    if (!(budget_seconds >= plan.seed_cost)) {
        throw InfeasibleSeed("budget of " + std::to_string(budget_seconds) + " s cannot cover " +
                             std::to_string(n_hard_seed) + " hard examples (" +
                             std::to_string(plan.seed_cost) + " s)");
    }
    bool excluded = false;
    for (int g : grid) {
        if (g < 0) throw InvalidArgument("augmentation counts must be non-negative");
        if (plan.seed_cost + g * plan.per_example <= budget_seconds) {
            plan.feasible_counts.push_back(g);
        } else {
            excluded = true;
        }
    }
    plan.binding = excluded ? "budget" : "grid";
    return plan;
}

DatasetManifest budget_manifest(const BudgetPlan& plan, int count, Axis axis, std::uint64_t base_seed,
                                const TierCatalog& catalog, physics::FlowKind kind) {
    if (std::find(plan.feasible_counts.begin(), plan.feasible_counts.end(), count) ==
        plan.feasible_counts.end()) {
        throw InvalidArgument("count " + std::to_string(count) + " is not feasible under the budget");
    }
    DatasetManifest m;
    m.name = "budget_" + std::string(geometry::to_string(plan.augmentation_tier)) + "_" + std::to_string(count);
    m.axis = axis;
    m.kind = kind;
    // The hard seed and the augmentation stream are shared by every plan point,
    // so a larger count extends a smaller one.
    TierEntry hard = tier_spec(axis, Tier::Hard, catalog);
    hard.count = plan.n_hard_seed;
    hard.base_seed = derive_seed(base_seed, "hard_seed");
    if (plan.augmentation_tier == Tier::Hard) {
        hard.count += count;
        m.entries = {hard};
    } else {
        TierEntry aug = tier_spec(axis, plan.augmentation_tier, catalog);
        aug.count = count;
        aug.base_seed = derive_seed(base_seed, "augment_" + std::string(geometry::to_string(plan.augmentation_tier)));
        m.entries = {hard, aug};
    }
    m.held_out = make_held_out(axis, Tier::Hard, base_seed, catalog);
    return m;
}

double total_cost(const DatasetManifest& m, const cost::CostModel& model) {
    double s = 0.0;
    for (const auto& e : m.entries) {
        if (e.count > 0) s += e.count * model.at(e.tier);
    }
    return s;
}

double compute_savings_ratio(const DatasetManifest& reference, const DatasetManifest& mixed,
                             const cost::CostModel& model) {
    const double mixed_cost = total_cost(mixed, model);
    if (!(mixed_cost > 0.0)) throw InvalidArgument("mixed manifest has zero cost");
    return total_cost(reference, model) / mixed_cost;
}

DatasetManifest all_hard_reference(const DatasetManifest& m, const TierCatalog& catalog) {
    DatasetManifest ref;
    ref.name = m.name + "_reference";
    ref.axis = m.axis;
    ref.kind = m.kind;
    TierEntry hard = tier_spec(m.axis, Tier::Hard, catalog);
    hard.count = m.total_count();
    hard.base_seed = derive_seed(m.held_out.seed, "reference");
    ref.entries = {hard};
    ref.held_out = m.held_out;
    return ref;
}

std::uint64_t example_seed(const TierEntry& e, int index) {
    return derive_seed(e.base_seed, static_cast<std::uint64_t>(index));
}

std::uint64_t held_out_seed(const HeldOut& h, int index) {
    return derive_seed(h.seed, static_cast<std::uint64_t>(index));
}

void check_held_out_disjoint(const std::vector<DatasetManifest>& family) {
    std::set<std::uint64_t> held;
    for (const auto& m : family) {
        for (int k = 0; k < m.held_out.count; ++k) held.insert(held_out_seed(m.held_out, k));
    }
    for (const auto& m : family) {
        for (const auto& e : m.entries) {
            for (int k = 0; k < e.count; ++k) {
                if (held.count(example_seed(e, k))) {
                    throw SchemaError("manifest " + m.name + " trains on held-out seed " +
                                      std::to_string(example_seed(e, k)));
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generation

CaseSpec draw_case(const TierEntry& e, Axis axis, std::uint64_t seed, const GenerationSettings& g) {
    CaseSpec spec;
    spec.seed = seed;
    spec.axis = axis;
    spec.tier = e.tier;
    spec.re = physics::sample_reynolds(e.re_band, seed);

    int count = e.obstacles.min;
    if (e.obstacles.max > e.obstacles.min) {
        CounterRng rng(derive_seed(seed, "count"));
        const int span = e.obstacles.max - e.obstacles.min + 1;
        count += std::min(span - 1, static_cast<int>(rng.uniform() * span));
    }

    geometry::SamplingParams sp = g.sampling;
    sp.size_lo = e.obstacles.size_lo;
    sp.size_hi = e.obstacles.size_hi;
    constexpr int kRedraws = 16;
    for (int attempt = 0; attempt < kRedraws; ++attempt) {
        const std::uint64_t oseed = attempt == 0 ? seed : derive_seed(seed, "redraw_" + std::to_string(attempt));
        geometry::ObstacleSet obs = geometry::sample_obstacles(count, sp, oseed);
        if (count == 0 || geometry::fluid_connected(geometry::rasterize_mask(obs, g.solver.grid))) {
            spec.obstacles = std::move(obs);
            return spec;
        }
    }
    throw DisconnectedDomain("no connected layout of " + std::to_string(count) + " obstacles after " +
                             std::to_string(kRedraws) + " draws");
}

solver::CaseSetup setup_case(const CaseSpec& spec, physics::FlowKind kind, const GenerationSettings& g) {
    const auto boundary = physics::boundary_from_re(kind, spec.re, g.fluid);
    solver::CaseSetup c = solver::build_case(spec.obstacles, boundary, g.fluid, g.solver);
    c.export_grid = g.export_grid;
    c.seed = spec.seed;
    c.labels = {spec.seed, spec.axis, spec.tier};
    return c;
}

namespace {

struct Job {
    TierEntry entry;
    int index = 0;
    bool held_out = false;
    std::uint64_t seed = 0;
    std::string path;
};

std::string file_name(const Job& j) {
    char buf[64];
    if (j.held_out) {
        std::snprintf(buf, sizeof(buf), "heldout_%05d.nst", j.index);
    } else {
        std::snprintf(buf, sizeof(buf), "%s_%05d.nst", std::string(geometry::to_string(j.entry.tier)).c_str(),
                      j.index);
    }
    return buf;
}

}  // namespace

MaterializeResult materialize_manifest(const DatasetManifest& m, const std::filesystem::path& out_dir,
                                       const GenerationSettings& g, const MaterializeOptions& opt) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    const std::filesystem::path dir = out_dir / m.name;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    // Costs recorded by an earlier run survive a resume.
    std::map<std::string, FileRef> previous;
    const auto manifest_path = dir / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        try {
            for (auto& f : read_manifest(manifest_path).files) previous[f.path] = f;
        } catch (const Error&) {
        }
    }

    std::vector<Job> jobs;
    std::map<Tier, int> next_index;
    for (const auto& e : m.entries) {
        for (int k = 0; k < e.count; ++k) {
            Job j;
            j.entry = e;
            j.index = next_index[e.tier]++;
            j.seed = example_seed(e, k);
            jobs.push_back(j);
        }
    }
    if (opt.include_held_out) {
        for (int k = 0; k < m.held_out.count; ++k) {
            Job j;
            j.entry = m.held_out.spec;
            j.index = k;
            j.held_out = true;
            j.seed = held_out_seed(m.held_out, k);
            jobs.push_back(j);
        }
    }
    for (auto& j : jobs) j.path = file_name(j);

    MaterializeResult result;
    result.manifest = m;
    result.manifest.files.assign(jobs.size(), FileRef{});
    result.manifest_path = manifest_path;
    std::mutex writer;

    parallel_for(jobs.size(), opt.workers, [&](std::size_t k) {
        const Job& job = jobs[k];
        FileRef ref;
        ref.path = job.path;
        ref.tier = job.entry.tier;
        ref.index = job.index;
        ref.held_out = job.held_out;
        ref.seed = job.seed;
        bool simulated = false;
        try {
            const CaseSpec spec = draw_case(job.entry, m.axis, job.seed, g);
            ref.re = spec.re;
            ref.obstacles = static_cast<int>(spec.obstacles.size());
            const auto target = dir / job.path;
            if (std::filesystem::exists(target) && trajio::is_valid_trajectory_file(target)) {
                ref.status = "existing";
                auto it = previous.find(job.path);
                if (it != previous.end() && it->second.seed == job.seed) ref.cost = it->second.cost;
            } else {
                const solver::CaseSetup c = setup_case(spec, m.kind, g);
                solver::RunResult run = solver::run_simulation(c);
                trajio::write_trajectory(run.trajectory, target);
                ref.cost = run.cost;
                ref.status = "ok";
                simulated = true;
            }
        } catch (const solver::RunAborted& e) {
            ref.status = std::string("failed: ") + e.what();
            ref.cost = e.partial();
        } catch (const std::exception& e) {
            ref.status = std::string("failed: ") + e.what();
        }

        std::lock_guard<std::mutex> lock(writer);
        if (ref.status.rfind("failed", 0) == 0) {
            ++result.failed;
        } else if (simulated) {
            ++result.simulated;
        } else {
            ++result.skipped;
        }
        if (ref.cost && simulated) result.costs.push_back(*ref.cost);
        result.manifest.files[k] = ref;
        if (opt.on_file) opt.on_file(ref);
    });

    std::sort(result.costs.begin(), result.costs.end(),
              [](const cost::CostRecord& a, const cost::CostRecord& b) { return a.sim_id < b.sim_id; });
    write_manifest(result.manifest, manifest_path);
    result.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    return result;
}

}  // namespace nspregen::planner
