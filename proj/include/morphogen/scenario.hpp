#pragma once

#include "morphogen/engine.hpp"
#include "morphogen/error.hpp"
#include "morphogen/network.hpp"
#include "morphogen/random.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace morphogen {

struct CenterSpec {
    Point position;
    int activity = 1;
    bool assignable = false;
};

// Extra nodes are numbered after the centers; edges index the combined list.
struct NetworkSpec {
    std::vector<Point> nodes;
    std::vector<std::array<std::size_t, 2>> edges;
};

struct RandomNetworkSpec {
    int center_count = 4;
    int activity_count = 2;
    std::optional<int> extra_node_count; // default: twice the number of centers
};

// Initial world description. With an explicit `network` the layout is fixed; otherwise
// the network (and, when `centers` is empty, the centers too) is drawn from the seed.
struct ScenarioSpec {
    int world_size = 56;
    std::vector<CenterSpec> centers;
    std::optional<NetworkSpec> network;
    RandomNetworkSpec random;
    std::optional<int> activity_count;

    void validate() const
    {
        if (world_size < 2) throw InputError("world_size must be >= 2");
        if (network && centers.empty()) throw InputError("an explicit network needs at least one center");
        if (!network && centers.empty() && random.center_count < 1) {
            throw InputError("random scenario needs center_count >= 1");
        }
        if (random.activity_count < 1) throw InputError("activity_count must be >= 1");
        if (random.extra_node_count && *random.extra_node_count < 0) {
            throw InputError("extra_node_count must be >= 0");
        }
        for (const auto& c : centers) {
            if (c.activity < 1) throw InputError("center activity must be >= 1");
        }
    }
};

inline constexpr std::uint64_t kLayoutStream = 0x6c61796f7574ULL;

// Random centers on distinct cell centroids. Activities are uniform in
// [1, activity_count], redrawn until every activity appears (when enough centers exist).
inline std::vector<CenterPlacement> random_centers(int world_size, int count, int activity_count, Rng& rng)
{
    if (count > world_size * world_size) throw InputError("more centers than lattice cells");
    std::vector<CenterPlacement> out;
    std::set<std::pair<int, int>> used;
    while (static_cast<int>(out.size()) < count) {
        const int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(world_size))) + 1;
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(world_size))) + 1;
        if (!used.insert({i, j}).second) continue;
        out.push_back({centroid(Cell{i, j}), 1});
    }
    const bool coverable = count >= activity_count;
    for (;;) {
        std::vector<bool> seen(static_cast<std::size_t>(activity_count) + 1, false);
        for (auto& c : out) {
            c.activity = static_cast<int>(rng.below(static_cast<std::uint64_t>(activity_count))) + 1;
            seen[static_cast<std::size_t>(c.activity)] = true;
        }
        if (!coverable || std::count(seen.begin() + 1, seen.end(), true) == activity_count) break;
    }
    return out;
}

inline RoadNetwork build_network(const ScenarioSpec& spec, std::uint64_t seed)
{
    spec.validate();
    RoadNetwork net;
    if (spec.network) {
        for (const auto& c : spec.centers) net.add_center(net.add_node(c.position), c.activity);
        for (const auto& p : spec.network->nodes) net.add_node(p);
        for (const auto& e : spec.network->edges) net.add_edge(e[0], e[1]);
    } else {
        Rng rng(derive_seed(seed, kLayoutStream));
        std::vector<CenterPlacement> centers;
        if (spec.centers.empty()) {
            centers = random_centers(spec.world_size, spec.random.center_count, spec.random.activity_count, rng);
        } else {
            for (const auto& c : spec.centers) centers.push_back({c.position, c.activity});
        }
        const int extra = spec.random.extra_node_count.value_or(2 * static_cast<int>(centers.size()));
        net = init_random_network(centers, extra, spec.world_size, rng);
    }
    if (spec.activity_count) net.set_activity_count(*spec.activity_count);
    return net;
}

inline SimulationState instantiate(const ScenarioSpec& spec, std::uint64_t seed)
{
    return SimulationState(Lattice(spec.world_size), build_network(spec, seed));
}

} // namespace morphogen
