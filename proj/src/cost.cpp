#include "nspregen/cost.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nspregen/errors.hpp"

namespace nspregen::cost {

const CellStats* CostTable::find(Axis a, Tier t) const {
    auto it = cells.find({a, t});
    return it == cells.end() ? nullptr : &it->second;
}

double CostModel::at(Tier t) const {
    auto it = seconds.find(t);
    if (it == seconds.end()) {
        throw MissingTier("no cost for tier " + std::string(geometry::to_string(t)));
    }
    return it->second;
}

CostTable aggregate_costs(const std::vector<CostRecord>& records) {
    if (records.empty()) throw InvalidArgument("no cost records to aggregate");
    std::map<std::pair<Axis, Tier>, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.axis, r.tier}].push_back(r.wall_seconds);

    CostTable table;
    for (const auto& [key, xs] : groups) {
        CellStats s;
        s.n = static_cast<int>(xs.size());
        double sum = 0.0;
        for (double x : xs) sum += x;
        s.mean_seconds = sum / s.n;
        if (s.n > 1) {
            double ss = 0.0;
            for (double x : xs) ss += (x - s.mean_seconds) * (x - s.mean_seconds);
            s.std_seconds = std::sqrt(ss / (s.n - 1));
        }
        table.cells[key] = s;
    }
    return table;
}

CostModel fit_cost_model(const CostTable& table, Axis axis) {
    CostModel m;
    m.axis = axis;
    for (Tier t : {Tier::Easy, Tier::Medium, Tier::Hard}) {
        const CellStats* s = table.find(axis, t);
        if (!s || s->n == 0) {
            throw MissingTier("cost table has no " + std::string(geometry::to_string(axis)) + "/" +
                              std::string(geometry::to_string(t)) + " cell");
        }
        m.seconds[t] = s->mean_seconds;
    }
    return m;
}

MonotonicityReport check_monotonicity(const CostTable& table, Axis axis) {
    const CostModel m = fit_cost_model(table, axis);
    MonotonicityReport r;
    r.axis = axis;
    r.easy = m.at(Tier::Easy);
    r.medium = m.at(Tier::Medium);
    r.hard = m.at(Tier::Hard);
    r.monotone = r.easy < r.medium && r.medium < r.hard;
    r.ratio_medium_easy = r.medium / r.easy;
    r.ratio_hard_medium = r.hard / r.medium;
    r.ratio_hard_easy = r.hard / r.easy;
    r.margin_medium_easy = r.medium - r.easy;
    r.margin_hard_medium = r.hard - r.medium;
    return r;
}

std::string host_tag() {
    char buf[256] = {};
    if (gethostname(buf, sizeof(buf) - 1) != 0 || buf[0] == '\0') return "unknown";
    std::string s(buf);
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = '_';
    }
    return s;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_num(const std::string& s, const char* what) {
    std::istringstream in(s);
    T v{};
    in >> v;
    if (in.fail() || !in.eof()) throw SchemaError(std::string("bad ") + what + " value '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw SchemaError(std::string("bad ") + what + " value '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw SchemaError(std::string("bad ") + what + " value '" + s + "'");
    }
}

constexpr const char* kCostHeader = "sim_id,axis,tier,obstacles,re,wall_seconds,steps,cg_iters,host";
constexpr const char* kTableHeader = "axis,tier,mean_seconds,std_seconds,n";

Tier tier_field(const std::string& s) {
    try {
        return geometry::parse_tier(s);
    } catch (const Error&) {
        throw SchemaError("unknown tier '" + s + "'");
    }
}

Axis axis_field(const std::string& s) {
    try {
        return geometry::parse_axis(s);
    } catch (const Error&) {
        throw SchemaError("unknown axis '" + s + "'");
    }
}

}  // namespace

void write_cost_csv(std::ostream& os, const std::vector<CostRecord>& records, bool header) {
    if (header) os << kCostHeader << '\n';
    for (const auto& r : records) {
        os << r.sim_id << ',' << geometry::to_string(r.axis) << ',' << geometry::to_string(r.tier) << ','
           << r.obstacle_count << ',' << fmt_double(r.re) << ',' << fmt_double(r.wall_seconds) << ','
           << r.steps << ',' << r.cg_iters_total << ',' << (r.host.empty() ? "unknown" : r.host) << '\n';
    }
}

void write_cost_csv(const std::filesystem::path& path, const std::vector<CostRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_cost_csv(out, records, true);
    if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<CostRecord> read_cost_csv(std::istream& is) {
    std::vector<CostRecord> out;
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("cost CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCostHeader) throw SchemaError("unexpected cost CSV header '" + line + "'");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 9) {
            throw SchemaError("cost CSV line " + std::to_string(lineno) + " has " +
                              std::to_string(f.size()) + " fields, expected 9");
        }
        CostRecord r;
        r.sim_id = parse_num<std::uint64_t>(f[0], "sim_id");
        r.axis = axis_field(f[1]);
        r.tier = tier_field(f[2]);
        r.obstacle_count = parse_num<int>(f[3], "obstacles");
        r.re = parse_double(f[4], "re");
        r.wall_seconds = parse_double(f[5], "wall_seconds");
        r.steps = parse_num<std::int64_t>(f[6], "steps");
        r.cg_iters_total = parse_num<std::int64_t>(f[7], "cg_iters");
        r.host = f[8];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CostRecord> read_cost_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_cost_csv(in);
}

void write_table_csv(std::ostream& os, const CostTable& table) {
    os << kTableHeader << '\n';
    for (const auto& [key, s] : table.cells) {
        os << geometry::to_string(key.first) << ',' << geometry::to_string(key.second) << ','
           << fmt_double(s.mean_seconds) << ',' << fmt_double(s.std_seconds) << ',' << s.n << '\n';
    }
}

CostTable read_table_csv(std::istream& is) {
    CostTable table;
    std::string line;
    if (!std::getline(is, line)) throw SchemaError("cost table CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTableHeader) throw SchemaError("unexpected cost table header '" + line + "'");
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 5) throw SchemaError("cost table row has " + std::to_string(f.size()) + " fields");
        CellStats s;
        s.mean_seconds = parse_double(f[2], "mean_seconds");
        s.std_seconds = parse_double(f[3], "std_seconds");
        s.n = parse_num<int>(f[4], "n");
        table.cells[{axis_field(f[0]), tier_field(f[1])}] = s;
    }
    return table;
}

}  // namespace nspregen::cost
