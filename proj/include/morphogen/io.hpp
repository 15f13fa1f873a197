#pragma once

#include "morphogen/engine.hpp"
#include "morphogen/error.hpp"
#include "morphogen/network.hpp"
#include "morphogen/scenario.hpp"
#include "morphogen/segregation.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace morphogen::io {

using Json = nlohmann::json;

// Schema violation; the message starts with the JSON path of the offending value.
class SchemaError : public InputError {
public:
    SchemaError(const std::string& path, const std::string& what) : InputError(path + ": " + what) {}
};

namespace detail {

inline void allow_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!obj.is_object()) throw SchemaError(path, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw SchemaError(path + "." + k, "unknown key");
    }
}

inline double number(const Json& v, const std::string& path)
{
    if (!v.is_number()) throw SchemaError(path, "expected a number");
    return v.get<double>();
}

inline long long integer(const Json& v, const std::string& path)
{
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
    return v.get<long long>();
}

inline std::uint64_t seed_value(const Json& v, const std::string& path)
{
    if (!v.is_number_integer()) throw SchemaError(path, "expected an integer seed");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const auto s = v.get<long long>();
    if (s < 0) throw SchemaError(path, "seed must be >= 0");
    return static_cast<std::uint64_t>(s);
}

inline bool boolean(const Json& v, const std::string& path)
{
    if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
    return v.get<bool>();
}

template <typename Fn>
void if_present(const Json& obj, const char* key, const std::string& path, Fn&& fn)
{
    if (obj.contains(key)) fn(obj.at(key), path + "." + key);
}

inline Point point(const Json& v, const std::string& path)
{
    if (!v.is_array() || v.size() != 2) throw SchemaError(path, "expected [x, y]");
    return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
}

} // namespace detail

struct SweepBlock {
    double step = 0.2;
    int replicates = 5;
};

struct DiffBlock {
    double step = 0.2;
    int n_parallel = 20;
    int replicates = 3;
};

struct OptimizeBlock {
    int replicates = 5;
    bool station_in_accessibility = true;
};

struct ScenarioFile {
    ScenarioSpec spec;
    EngineConfig engine;
    std::optional<std::uint64_t> seed; // engine.seed when present in the file
    std::optional<SegregationConfig> segregation;
    int moran_m = 0; // 0: default for world size
    SweepBlock sweep;
    DiffBlock diffmap;
    OptimizeBlock optimize;
};

inline EngineConfig parse_engine(const Json& e, const std::string& path, std::optional<std::uint64_t>& seed)
{
    using namespace detail;
    allow_keys(e, path, {"alpha", "n_per_step", "theta2", "rho", "p4", "pD", "pS", "pA", "steps", "seed"});
    EngineConfig c;
    if_present(e, "alpha", path, [&](const Json& v, const std::string& p) {
        if (!v.is_array() || v.size() != 4) throw SchemaError(p, "expected 4 weights");
        for (std::size_t k = 0; k < 4; ++k) c.weights.alpha[k] = number(v[k], p + "[" + std::to_string(k) + "]");
    });
    if_present(e, "n_per_step", path, [&](const Json& v, const std::string& p) { c.n_per_step = static_cast<int>(integer(v, p)); });
    if_present(e, "theta2", path, [&](const Json& v, const std::string& p) { c.theta2 = number(v, p); });
    if_present(e, "rho", path, [&](const Json& v, const std::string& p) { c.rho = number(v, p); });
    if_present(e, "p4", path, [&](const Json& v, const std::string& p) { c.p4 = number(v, p); });
    if_present(e, "pD", path, [&](const Json& v, const std::string& p) { c.pD = number(v, p); });
    if_present(e, "pS", path, [&](const Json& v, const std::string& p) { c.pS = number(v, p); });
    if_present(e, "pA", path, [&](const Json& v, const std::string& p) { c.pA = number(v, p); });
    if_present(e, "steps", path, [&](const Json& v, const std::string& p) { c.steps = static_cast<int>(integer(v, p)); });
    if_present(e, "seed", path, [&](const Json& v, const std::string& p) { seed = seed_value(v, p); });
    if (seed) c.seed = *seed;
    return c;
}

inline SegregationConfig parse_segregation(const Json& s, const std::string& path)
{
    using namespace detail;
    allow_keys(s, path, {"agent_density", "tolerance", "type_count", "max_sweeps", "radius"});
    SegregationConfig c;
    if_present(s, "agent_density", path, [&](const Json& v, const std::string& p) { c.agent_density = number(v, p); });
    if_present(s, "tolerance", path, [&](const Json& v, const std::string& p) { c.tolerance = number(v, p); });
    if_present(s, "type_count", path, [&](const Json& v, const std::string& p) { c.type_count = static_cast<int>(integer(v, p)); });
    if_present(s, "max_sweeps", path, [&](const Json& v, const std::string& p) { c.max_sweeps = static_cast<int>(integer(v, p)); });
    if_present(s, "radius", path, [&](const Json& v, const std::string& p) { c.radius = number(v, p); });
    return c;
}

inline ScenarioFile parse_scenario(const Json& root)
{
    using namespace detail;
    const std::string path = "$";
    allow_keys(root, path, {"world_size", "activity_count", "centers", "network", "random_network", "engine",
                            "segregation", "moran_m", "sweep", "diffmap", "optimize"});
    ScenarioFile f;
    if (!root.contains("world_size")) throw SchemaError("$.world_size", "required key missing");
    f.spec.world_size = static_cast<int>(integer(root.at("world_size"), "$.world_size"));
    if (f.spec.world_size < 2) throw SchemaError("$.world_size", "must be >= 2");
    if_present(root, "activity_count", path, [&](const Json& v, const std::string& p) {
        f.spec.activity_count = static_cast<int>(integer(v, p));
        if (*f.spec.activity_count < 1) throw SchemaError(p, "must be >= 1");
    });

    if_present(root, "centers", path, [&](const Json& v, const std::string& p) {
        if (!v.is_array()) throw SchemaError(p, "expected an array");
        for (std::size_t k = 0; k < v.size(); ++k) {
            const auto cp = p + "[" + std::to_string(k) + "]";
            allow_keys(v[k], cp, {"x", "y", "activity", "assignable"});
            for (const char* req : {"x", "y", "activity"}) {
                if (!v[k].contains(req)) throw SchemaError(cp + "." + req, "required key missing");
            }
            CenterSpec c;
            c.position = {number(v[k].at("x"), cp + ".x"), number(v[k].at("y"), cp + ".y")};
            c.activity = static_cast<int>(integer(v[k].at("activity"), cp + ".activity"));
            if (c.activity < 1) throw SchemaError(cp + ".activity", "must be >= 1");
            if_present(v[k], "assignable", cp, [&](const Json& b, const std::string& bp) { c.assignable = boolean(b, bp); });
            f.spec.centers.push_back(c);
        }
    });

    if (root.contains("network") && root.contains("random_network")) {
        throw SchemaError("$.network", "network and random_network are mutually exclusive");
    }
    if_present(root, "network", path, [&](const Json& v, const std::string& p) {
        allow_keys(v, p, {"nodes", "edges"});
        NetworkSpec net;
        if_present(v, "nodes", p, [&](const Json& nodes, const std::string& np) {
            if (!nodes.is_array()) throw SchemaError(np, "expected an array");
            for (std::size_t k = 0; k < nodes.size(); ++k) net.nodes.push_back(point(nodes[k], np + "[" + std::to_string(k) + "]"));
        });
        const std::size_t node_total = f.spec.centers.size() + net.nodes.size();
        if_present(v, "edges", p, [&](const Json& edges, const std::string& ep) {
            if (!edges.is_array()) throw SchemaError(ep, "expected an array");
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const auto kp = ep + "[" + std::to_string(k) + "]";
                if (!edges[k].is_array() || edges[k].size() != 2) throw SchemaError(kp, "expected [from, to]");
                std::array<std::size_t, 2> e{};
                for (std::size_t s = 0; s < 2; ++s) {
                    const auto idx = integer(edges[k][s], kp + "[" + std::to_string(s) + "]");
                    if (idx < 0 || static_cast<std::size_t>(idx) >= node_total) {
                        throw SchemaError(kp + "[" + std::to_string(s) + "]", "node index out of range");
                    }
                    e[s] = static_cast<std::size_t>(idx);
                }
                net.edges.push_back(e);
            }
        });
        f.spec.network = std::move(net);
    });
    if_present(root, "random_network", path, [&](const Json& v, const std::string& p) {
        allow_keys(v, p, {"center_count", "activity_count", "extra_node_count"});
        if_present(v, "center_count", p, [&](const Json& x, const std::string& xp) { f.spec.random.center_count = static_cast<int>(integer(x, xp)); });
        if_present(v, "activity_count", p, [&](const Json& x, const std::string& xp) { f.spec.random.activity_count = static_cast<int>(integer(x, xp)); });
        if_present(v, "extra_node_count", p, [&](const Json& x, const std::string& xp) { f.spec.random.extra_node_count = static_cast<int>(integer(x, xp)); });
    });

    if_present(root, "engine", path, [&](const Json& v, const std::string& p) { f.engine = parse_engine(v, p, f.seed); });
    if_present(root, "segregation", path, [&](const Json& v, const std::string& p) { f.segregation = parse_segregation(v, p); });
    if_present(root, "moran_m", path, [&](const Json& v, const std::string& p) { f.moran_m = static_cast<int>(integer(v, p)); });
    if_present(root, "sweep", path, [&](const Json& v, const std::string& p) {
        allow_keys(v, p, {"step", "replicates"});
        if_present(v, "step", p, [&](const Json& x, const std::string& xp) { f.sweep.step = number(x, xp); });
        if_present(v, "replicates", p, [&](const Json& x, const std::string& xp) { f.sweep.replicates = static_cast<int>(integer(x, xp)); });
    });
    if_present(root, "diffmap", path, [&](const Json& v, const std::string& p) {
        allow_keys(v, p, {"step", "n_parallel", "replicates"});
        if_present(v, "step", p, [&](const Json& x, const std::string& xp) { f.diffmap.step = number(x, xp); });
        if_present(v, "n_parallel", p, [&](const Json& x, const std::string& xp) { f.diffmap.n_parallel = static_cast<int>(integer(x, xp)); });
        if_present(v, "replicates", p, [&](const Json& x, const std::string& xp) { f.diffmap.replicates = static_cast<int>(integer(x, xp)); });
    });
    if_present(root, "optimize", path, [&](const Json& v, const std::string& p) {
        allow_keys(v, p, {"replicates", "station_in_accessibility"});
        if_present(v, "replicates", p, [&](const Json& x, const std::string& xp) { f.optimize.replicates = static_cast<int>(integer(x, xp)); });
        if_present(v, "station_in_accessibility", p, [&](const Json& x, const std::string& xp) { f.optimize.station_in_accessibility = boolean(x, xp); });
    });

    if (f.spec.network && f.spec.centers.empty()) throw SchemaError("$.centers", "an explicit network needs centers");
    try {
        f.spec.validate();
    } catch (const InputError& e) {
        throw SchemaError("$", e.what());
    }
    return f;
}

inline Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw SchemaError("$", std::string("malformed JSON: ") + e.what());
    }
}

inline Json engine_to_json(const EngineConfig& c)
{
    return Json{{"alpha", c.weights.alpha}, {"n_per_step", c.n_per_step}, {"theta2", c.theta2}, {"rho", c.rho},
                {"p4", c.p4},      {"pD", c.pD},                 {"pS", c.pS},         {"pA", c.pA},
                {"steps", c.steps}, {"seed", c.seed}};
}

inline Json segregation_to_json(const SegregationConfig& c)
{
    return Json{{"agent_density", c.agent_density}, {"tolerance", c.tolerance}, {"type_count", c.type_count},
                {"max_sweeps", c.max_sweeps},       {"radius", c.radius}};
}

// Nodes as [x, y], edges as node index pairs, centers as {node, activity}.
inline Json network_to_json(const RoadNetwork& net)
{
    Json nodes = Json::array();
    for (const auto& p : net.nodes()) nodes.push_back({p.x, p.y});
    Json edges = Json::array();
    for (const auto& e : net.edges()) edges.push_back({e.a, e.b});
    Json centers = Json::array();
    for (const auto& c : net.centers()) centers.push_back({{"node", c.node}, {"activity", c.activity}});
    return Json{{"nodes", nodes}, {"edges", edges}, {"centers", centers}, {"activity_count", net.activity_count()}};
}

inline RoadNetwork network_from_json(const Json& j)
{
    using namespace detail;
    allow_keys(j, "$.network", {"nodes", "edges", "centers", "activity_count"});
    RoadNetwork net;
    for (std::size_t k = 0; k < j.at("nodes").size(); ++k) {
        net.add_node(point(j.at("nodes")[k], "$.network.nodes[" + std::to_string(k) + "]"));
    }
    for (const auto& e : j.at("edges")) net.add_edge(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    for (const auto& c : j.at("centers")) net.add_center(c.at("node").get<std::size_t>(), c.at("activity").get<int>());
    if (j.contains("activity_count")) net.set_activity_count(j.at("activity_count").get<int>());
    return net;
}

// Row k (k = 0..N-1) describes j = k + 1; character i - 1 is '1' when cell (i, j) is built.
inline Json lattice_to_json(const Lattice& l)
{
    Json rows = Json::array();
    for (int j = 1; j <= l.size(); ++j) {
        std::string row;
        for (int i = 1; i <= l.size(); ++i) row.push_back(l.built(Cell{i, j}) ? '1' : '0');
        rows.push_back(row);
    }
    return rows;
}

inline Lattice lattice_from_json(const Json& rows)
{
    const int n = static_cast<int>(rows.size());
    Lattice l(n);
    for (int j = 1; j <= n; ++j) {
        const auto row = rows[static_cast<std::size_t>(j - 1)].get<std::string>();
        if (static_cast<int>(row.size()) != n) throw SchemaError("$.pattern", "rows must have N characters");
        for (int i = 1; i <= n; ++i) {
            if (row[static_cast<std::size_t>(i - 1)] == '1') l.build(Cell{i, j});
        }
    }
    return l;
}

inline Json metrics_to_json(const MetricVector& m)
{
    Json j{{"D", m.D}, {"I", m.I}, {"S", m.S}, {"A", m.A}};
    if (m.H) j["H"] = *m.H;
    return j;
}

inline Json result_to_json(const SimulationResult& r, const std::optional<SegregationConfig>& segregation)
{
    Json log = Json::array();
    for (const auto& placed : r.log) {
        Json step = Json::array();
        for (const Cell c : placed) step.push_back({c.i, c.j});
        log.push_back(step);
    }
    Json j{{"format", "morphogen-result/1"},
           {"seed", r.seed},
           {"config", engine_to_json(r.config)},
           {"moran_m", r.moran_partitions},
           {"world_size", r.state.lattice.size()},
           {"steps_run", r.state.step_index},
           {"built_count", r.state.lattice.built_count()},
           {"metrics", metrics_to_json(r.metrics)},
           {"pattern", lattice_to_json(r.state.lattice)},
           {"network", network_to_json(r.state.network)},
           {"build_log", log}};
    if (segregation) j["segregation"] = segregation_to_json(*segregation);
    return j;
}

// Recomputes the metric vector from the pattern and network embedded in a result.
inline MetricVector recompute_metrics(const Json& result)
{
    std::optional<std::uint64_t> seed;
    const auto config = parse_engine(result.at("config"), "$.config", seed);
    const int moran = result.at("moran_m").get<int>();
    const auto lattice = lattice_from_json(result.at("pattern"));
    const auto net = network_from_json(result.at("network"));
    auto m = compute_metrics(lattice, net, config.metric_params(moran));
    if (result.contains("segregation")) {
        const auto seg = parse_segregation(result.at("segregation"), "$.segregation");
        m.H = residential_segregation(lattice, seg, config.seed, moran);
    }
    return m;
}

// Plain PGM (P2): built = 0, empty = 255; row k is j = k + 1.
inline std::string to_pgm(const Lattice& l)
{
    std::ostringstream out;
    out << "P2\n" << l.size() << ' ' << l.size() << "\n255\n";
    for (int j = 1; j <= l.size(); ++j) {
        for (int i = 1; i <= l.size(); ++i) {
            if (i > 1) out << ' ';
            out << (l.built(Cell{i, j}) ? 0 : 255);
        }
        out << '\n';
    }
    return out.str();
}

inline std::string format_double(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace morphogen::io
