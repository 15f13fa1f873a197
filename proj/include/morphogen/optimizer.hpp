#pragma once

#include "morphogen/engine.hpp"
#include "morphogen/error.hpp"
#include "morphogen/explorer.hpp"
#include "morphogen/metrics.hpp"
#include "morphogen/parallel.hpp"
#include "morphogen/random.hpp"
#include "morphogen/scenario.hpp"
#include "morphogen/segregation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace morphogen {

// One bit per assignable center: 0 -> activity 1, 1 -> activity 2.
using Assignment = std::vector<std::uint8_t>;

inline std::string to_string(const Assignment& bits)
{
    std::string s;
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

// All 2^c - 2 non-uniform assignments, in lexicographic order of their bit strings.
inline std::vector<Assignment> enumerate_assignments(int center_count)
{
    if (center_count < 2) throw InputError("assignment enumeration needs at least two centers");
    if (center_count > 30) throw InputError("too many assignable centers to enumerate");
    const std::uint64_t total = std::uint64_t{1} << center_count;
    std::vector<Assignment> out;
    out.reserve(static_cast<std::size_t>(total - 2));
    for (std::uint64_t code = 1; code + 1 < total; ++code) {
        Assignment a(static_cast<std::size_t>(center_count));
        for (int k = 0; k < center_count; ++k) {
            a[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>((code >> (center_count - 1 - k)) & 1U);
        }
        out.push_back(std::move(a));
    }
    return out;
}

// A fixed district: explicit network, assignable centers (flagged in the scenario) and
// fixed-activity centers such as a transport hub.
struct ZoningScenario {
    ScenarioSpec scenario;
    EngineConfig engine;
    SegregationConfig segregation;
    int moran_partitions = 0;
    bool station_in_accessibility = true; // fixed centers count as activities in d4
    bool common_seed = false;             // every replicate reuses base_seed
    std::uint64_t base_seed = 0;

    std::vector<std::size_t> assignable() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < scenario.centers.size(); ++k) {
            if (scenario.centers[k].assignable) out.push_back(k);
        }
        return out;
    }

    void validate() const
    {
        scenario.validate();
        if (!scenario.network) throw InputError("zoning scenario needs an explicit network");
        if (assignable().size() < 2) throw InputError("zoning scenario needs at least two assignable centers");
        segregation.validate();
    }

    // Weights used for every zoning run: medium density, strong activity accessibility.
    static WeightVector zoning_weights() { return {{0.7, 0.0, 0.0, 1.0}}; }
};

// Centers with their activities under `bits` (fixed centers keep theirs).
inline std::vector<CenterPlacement> assigned_centers(const ZoningScenario& z, const Assignment& bits)
{
    const auto slots = z.assignable();
    if (bits.size() != slots.size()) throw InputError("assignment length does not match assignable centers");
    std::vector<CenterPlacement> out;
    for (const auto& c : z.scenario.centers) out.push_back({c.position, c.activity});
    for (std::size_t k = 0; k < slots.size(); ++k) out[slots[k]].activity = bits[k] ? 2 : 1;
    return out;
}

struct AssignmentRecord {
    Assignment bits;
    std::vector<double> H_values;
    std::vector<double> A_values;
    std::vector<std::string> errors;
    double H_mean = 0.0;
    double H_std = 0.0;
    double A_mean = 0.0;
    double A_std = 0.0;
    double lambda = 0.0;
    bool pareto = false;

    bool valid() const { return !H_values.empty(); }
};

inline SimulationState zoning_state(const ZoningScenario& z, const Assignment& bits)
{
    const auto centers = assigned_centers(z, bits);
    const auto slots = z.assignable();
    RoadNetwork net;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        const NodeId id = net.add_node(centers[k].position);
        const bool fixed = std::find(slots.begin(), slots.end(), k) == slots.end();
        if (!fixed || z.station_in_accessibility) net.add_center(id, centers[k].activity);
    }
    for (const auto& p : z.scenario.network->nodes) net.add_node(p);
    for (const auto& e : z.scenario.network->edges) net.add_edge(e[0], e[1]);
    return SimulationState(Lattice(z.scenario.world_size), std::move(net));
}

inline AssignmentRecord evaluate_assignment(const Assignment& bits, const ZoningScenario& z, int replicates)
{
    z.validate();
    if (replicates < 1) throw InputError("replicates must be >= 1");
    AssignmentRecord rec;
    rec.bits = bits;
    const auto centers = assigned_centers(z, bits);
    int amax = 0;
    for (const auto& c : centers) amax = std::max(amax, c.activity);
    rec.lambda = heterogeneity_lambda(centers, amax);

    const int moran = z.moran_partitions ? z.moran_partitions : default_moran_partitions(z.scenario.world_size);
    for (int r = 0; r < replicates; ++r) {
        EngineConfig config = z.engine;
        config.weights = ZoningScenario::zoning_weights();
        config.seed = z.common_seed ? z.base_seed : derive_seed(z.base_seed, static_cast<std::uint64_t>(r));
        try {
            const auto result = run(zoning_state(z, bits), config, moran);
            const double h = residential_segregation(result.state.lattice, z.segregation, config.seed, moran);
            rec.H_values.push_back(h);
            rec.A_values.push_back(result.metrics.A);
        } catch (const Error& e) {
            rec.errors.push_back(e.what());
        }
    }
    if (rec.valid()) {
        const auto hs = replicate_stats(rec.H_values);
        const auto as = replicate_stats(rec.A_values);
        rec.H_mean = hs.mean;
        rec.H_std = hs.std;
        rec.A_mean = as.mean;
        rec.A_std = as.std;
    }
    return rec;
}

struct Objectives {
    double first = 0.0;
    double second = 0.0;
};

// Non-dominated flags under minimization of both objectives. A point is dominated when
// another is <= in both and < in at least one; exact duplicates do not dominate each other.
inline std::vector<bool> pareto_flags(std::span<const Objectives> points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].first != points[b].first) return points[a].first < points[b].first;
        return points[a].second < points[b].second;
    });
    std::vector<bool> flags(points.size(), false);
    double best_before = std::numeric_limits<double>::infinity(); // min second over strictly smaller first
    for (std::size_t g = 0; g < order.size();) {
        std::size_t end = g;
        while (end < order.size() && points[order[end]].first == points[order[g]].first) ++end;
        const double group_min = points[order[g]].second;
        for (std::size_t k = g; k < end; ++k) {
            const double s = points[order[k]].second;
            flags[order[k]] = s == group_min && s < best_before;
        }
        best_before = std::min(best_before, group_min);
        g = end;
    }
    return flags;
}

// Streaming front: points are offered one at a time, the archive keeps the current
// non-dominated set (by insertion id).
class ParetoArchive {
public:
    // Returns true if the point enters the front.
    bool offer(std::size_t id, Objectives p)
    {
        for (const auto& [other_id, q] : front_) {
            if (dominates(q, p)) return false;
        }
        std::erase_if(front_, [&](const auto& entry) { return dominates(p, entry.second); });
        front_.emplace_back(id, p);
        return true;
    }

    std::vector<std::size_t> members() const
    {
        std::vector<std::size_t> ids;
        for (const auto& entry : front_) ids.push_back(entry.first);
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    static bool dominates(Objectives a, Objectives b)
    {
        return a.first <= b.first && a.second <= b.second && (a.first < b.first || a.second < b.second);
    }

private:
    std::vector<std::pair<std::size_t, Objectives>> front_;
};

// Flags the (H, A) front among valid records; invalid records are never members.
inline void pareto_front(std::vector<AssignmentRecord>& records)
{
    std::vector<Objectives> points;
    std::vector<std::size_t> where;
    for (std::size_t k = 0; k < records.size(); ++k) {
        records[k].pareto = false;
        if (!records[k].valid()) continue;
        points.push_back({records[k].H_mean, records[k].A_mean});
        where.push_back(k);
    }
    if (points.empty()) throw InputError("Pareto front needs at least one valid record");
    const auto flags = pareto_flags(points);
    for (std::size_t k = 0; k < flags.size(); ++k) records[where[k]].pareto = flags[k];
}

inline std::vector<AssignmentRecord> optimize(const ZoningScenario& z, int replicates, int jobs = 1)
{
    z.validate();
    const auto assignments = enumerate_assignments(static_cast<int>(z.assignable().size()));
    std::vector<AssignmentRecord> records(assignments.size());
    parallel_for(assignments.size(), jobs,
                 [&](std::size_t k) { records[k] = evaluate_assignment(assignments[k], z, replicates); });
    pareto_front(records);
    return records;
}

} // namespace morphogen
