#include "nspregen/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "nspregen/errors.hpp"
#include "nspregen/pool.hpp"

namespace nspregen::config {

int RunConfig::resolved_workers() const { return workers > 0 ? workers : default_workers(); }

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not an integer");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] != '-') {
            const unsigned long long d = std::stoull(v, &pos);
            if (pos == v.size()) return d;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': '" + v + "' is not an unsigned integer");
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename Sel>
Key real_key(std::string name, Sel sel) {
    return {std::move(name),
            [sel](RunConfig& c, const std::string& k, const std::string& v) { sel(c) = to_double(k, v); },
            [sel](const RunConfig& c) { return fmt(sel(const_cast<RunConfig&>(c))); }};
}

template <typename Sel>
Key int_key(std::string name, Sel sel) {
    return {std::move(name),
            [sel](RunConfig& c, const std::string& k, const std::string& v) {
                const long long x = to_int(k, v);
                using T = std::remove_reference_t<decltype(sel(c))>;
                if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) {
                    throw ConfigError("key '" + k + "': value out of range");
                }
                sel(c) = static_cast<T>(x);
            },
            [sel](const RunConfig& c) { return std::to_string(sel(const_cast<RunConfig&>(c))); }};
}

void add_band(std::vector<Key>& keys, const std::string& prefix, physics::ReBand& (*sel)(RunConfig&)) {
    keys.push_back(real_key(prefix + ".lo", [sel](RunConfig& c) -> double& { return sel(c).lo; }));
    keys.push_back(real_key(prefix + ".hi", [sel](RunConfig& c) -> double& { return sel(c).hi; }));
    keys.push_back(real_key(prefix + ".mean", [sel](RunConfig& c) -> double& { return sel(c).mean; }));
    keys.push_back(real_key(prefix + ".sigma", [sel](RunConfig& c) -> double& { return sel(c).sigma; }));
}

void add_range(std::vector<Key>& keys, const std::string& prefix, planner::ObstacleRange& (*sel)(RunConfig&)) {
    keys.push_back(int_key(prefix + ".min", [sel](RunConfig& c) -> int& { return sel(c).min; }));
    keys.push_back(int_key(prefix + ".max", [sel](RunConfig& c) -> int& { return sel(c).max; }));
    keys.push_back(real_key(prefix + ".size_lo", [sel](RunConfig& c) -> double& { return sel(c).size_lo; }));
    keys.push_back(real_key(prefix + ".size_hi", [sel](RunConfig& c) -> double& { return sel(c).size_hi; }));
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(int_key("version", [](RunConfig& c) -> int& { return c.version; }));
        k.push_back({"seed", [](RunConfig& c, const std::string& n, const std::string& v) { c.seed = to_u64(n, v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        k.push_back({"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out = v; },
                     [](const RunConfig& c) { return c.out; }});
        k.push_back(int_key("workers", [](RunConfig& c) -> int& { return c.workers; }));
        k.push_back({"kind",
                     [](RunConfig& c, const std::string& n, const std::string& v) {
                         try {
                             c.kind = physics::parse_kind(v);
                         } catch (const Error&) {
                             throw ConfigError("key '" + n + "': unknown flow kind '" + v + "'");
                         }
                     },
                     [](const RunConfig& c) { return std::string(physics::to_string(c.kind)); }});
        k.push_back(int_key("profile.per_cell_n", [](RunConfig& c) -> int& { return c.per_cell_n; }));

        k.push_back(real_key("fluid.nu", [](RunConfig& c) -> double& { return c.generation.fluid.nu; }));
        k.push_back(real_key("fluid.L", [](RunConfig& c) -> double& { return c.generation.fluid.L; }));
        k.push_back(real_key("fluid.H", [](RunConfig& c) -> double& { return c.generation.fluid.H; }));

        k.push_back(int_key("solver.grid_h", [](RunConfig& c) -> int& { return c.generation.solver.grid.h; }));
        k.push_back(int_key("solver.grid_w", [](RunConfig& c) -> int& { return c.generation.solver.grid.w; }));
        k.push_back(real_key("solver.cfl", [](RunConfig& c) -> double& { return c.generation.solver.cfl; }));
        k.push_back(real_key("solver.p_tol", [](RunConfig& c) -> double& { return c.generation.solver.p_tol; }));
        k.push_back(real_key("solver.p_rel_tol", [](RunConfig& c) -> double& { return c.generation.solver.p_rel_tol; }));
        k.push_back(real_key("solver.u_tol", [](RunConfig& c) -> double& { return c.generation.solver.u_tol; }));
        k.push_back(real_key("solver.div_tol", [](RunConfig& c) -> double& { return c.generation.solver.div_tol; }));
        k.push_back(int_key("solver.max_cg_iters", [](RunConfig& c) -> int& { return c.generation.solver.max_cg_iters; }));
        k.push_back(int_key("solver.max_sgs_sweeps",
                            [](RunConfig& c) -> int& { return c.generation.solver.max_sgs_sweeps; }));
        k.push_back(int_key("solver.max_steps",
                            [](RunConfig& c) -> std::int64_t& { return c.generation.solver.max_steps; }));

        k.push_back(int_key("export.grid_h", [](RunConfig& c) -> int& { return c.generation.export_grid.h; }));
        k.push_back(int_key("export.grid_w", [](RunConfig& c) -> int& { return c.generation.export_grid.w; }));

        k.push_back(real_key("domain.lx", [](RunConfig& c) -> double& { return c.generation.sampling.domain.lx; }));
        k.push_back(real_key("domain.ly", [](RunConfig& c) -> double& { return c.generation.sampling.domain.ly; }));
        k.push_back(real_key("obstacles.margin", [](RunConfig& c) -> double& { return c.generation.sampling.margin_min; }));
        k.push_back(real_key("obstacles.gap", [](RunConfig& c) -> double& { return c.generation.sampling.gap_min; }));
        k.push_back(int_key("obstacles.max_attempts",
                            [](RunConfig& c) -> int& { return c.generation.sampling.max_attempts; }));

        add_band(k, "re.easy", [](RunConfig& c) -> physics::ReBand& { return c.catalog.re_easy; });
        add_band(k, "re.medium", [](RunConfig& c) -> physics::ReBand& { return c.catalog.re_medium; });
        add_band(k, "re.hard", [](RunConfig& c) -> physics::ReBand& { return c.catalog.re_hard; });
        add_band(k, "re.geometry", [](RunConfig& c) -> physics::ReBand& { return c.catalog.geometry_re; });
        add_range(k, "obstacles.easy", [](RunConfig& c) -> planner::ObstacleRange& { return c.catalog.obs_easy; });
        add_range(k, "obstacles.medium", [](RunConfig& c) -> planner::ObstacleRange& { return c.catalog.obs_medium; });
        add_range(k, "obstacles.hard", [](RunConfig& c) -> planner::ObstacleRange& { return c.catalog.obs_hard; });
        return k;
    }();
    return table;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.version != kConfigVersion) {
        throw ConfigError("key 'version': expected " + std::to_string(kConfigVersion) + ", got " +
                          std::to_string(c.version));
    }
    if (c.workers < 0) throw ConfigError("key 'workers': must be >= 0");
    if (c.per_cell_n < 1) throw ConfigError("key 'profile.per_cell_n': must be >= 1");
    const auto& f = c.generation.fluid;
    if (!(f.nu > 0.0)) throw ConfigError("key 'fluid.nu': must be positive");
    if (!(f.L > 0.0)) throw ConfigError("key 'fluid.L': must be positive");
    if (!(f.H > 0.0)) throw ConfigError("key 'fluid.H': must be positive");
    try {
        c.generation.solver.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("solver: ") + e.what());
    }
    if (c.generation.export_grid.h < 2 || c.generation.export_grid.w < 2) {
        throw ConfigError("key 'export.grid_h'/'export.grid_w': must be >= 2");
    }
    const auto& s = c.generation.sampling;
    if (!(s.domain.lx > 0.0 && s.domain.ly > 0.0)) throw ConfigError("key 'domain.lx'/'domain.ly': must be positive");
    if (c.kind == physics::FlowKind::FPO && s.domain.ly != f.H) {
        throw ConfigError("key 'fluid.H': must equal domain.ly for FPO");
    }
    if (!(s.margin_min >= 0.0)) throw ConfigError("key 'obstacles.margin': must be >= 0");
    if (!(s.gap_min >= 0.0)) throw ConfigError("key 'obstacles.gap': must be >= 0");
    if (s.max_attempts < 1) throw ConfigError("key 'obstacles.max_attempts': must be >= 1");
    const std::pair<const char*, const physics::ReBand*> bands[] = {{"re.easy", &c.catalog.re_easy},
                                                                    {"re.medium", &c.catalog.re_medium},
                                                                    {"re.hard", &c.catalog.re_hard},
                                                                    {"re.geometry", &c.catalog.geometry_re}};
    for (const auto& [name, b] : bands) {
        try {
            b->validate();
        } catch (const Error& e) {
            throw ConfigError(std::string("key '") + name + "': " + e.what());
        }
        if (b->lo < 10.0 || b->hi > 10000.0) throw ConfigError(std::string("key '") + name + "': must lie in [10, 10000]");
    }
    const std::pair<const char*, const planner::ObstacleRange*> ranges[] = {{"obstacles.easy", &c.catalog.obs_easy},
                                                                            {"obstacles.medium", &c.catalog.obs_medium},
                                                                            {"obstacles.hard", &c.catalog.obs_hard}};
    for (const auto& [name, r] : ranges) {
        if (r->min < 0 || r->max > 10 || r->min > r->max) {
            throw ConfigError(std::string("key '") + name + "': need 0 <= min <= max <= 10");
        }
        if (!(r->size_lo > 0.0 && r->size_lo <= r->size_hi)) {
            throw ConfigError(std::string("key '") + name + "': need 0 < size_lo <= size_hi");
        }
    }
}

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig c;
    c.version = 0;
    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Key* k = nullptr;
        for (const auto& cand : keys()) {
            if (cand.name == key) k = &cand;
        }
        if (!k) throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!seen.insert(key).second) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": key '" + key + "' repeated");
        }
        k->set(c, key, value);
    }
    if (!seen.count("version")) throw ConfigError(source + ": missing key 'version'");
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    return parse_config(in, path.string());
}

std::string dump_config(const RunConfig& c) {
    std::ostringstream os;
    for (const auto& k : keys()) os << k.name << " = " << k.get(c) << '\n';
    return os.str();
}

}  // namespace nspregen::config
