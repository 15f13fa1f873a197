#pragma once

#include "morphogen/error.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/metrics.hpp"
#include "morphogen/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace morphogen {

struct SegregationConfig {
    double agent_density = 0.15; // share of built cells holding an agent
    double tolerance = 0.6;      // minimum share of like-type neighbors to stay
    int type_count = 2;
    int max_sweeps = 500;
    double radius = 5.0;         // neighborhood radius, same disk convention as d1
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(agent_density > 0.0 && agent_density < 1.0)) throw InputError("agent_density must lie in (0,1)");
        if (!(tolerance >= 0.0 && tolerance <= 1.0)) throw InputError("tolerance must lie in [0,1]");
        if (type_count < 2) throw InputError("type_count must be >= 2");
        if (max_sweeps < 1) throw InputError("max_sweeps must be >= 1");
        if (!(radius > 0.0)) throw InputError("segregation radius must be > 0");
    }
};

struct ResidentialState {
    static constexpr int kVacant = -1;

    int size = 0;
    std::vector<int> occupant; // per lattice cell: type id or kVacant
    int sweeps = 0;
    long moves = 0;
    bool frozen = false;

    std::vector<int> type_counts() const
    {
        std::vector<int> counts;
        for (int t : occupant) {
            if (t == kVacant) continue;
            if (static_cast<std::size_t>(t) >= counts.size()) counts.resize(static_cast<std::size_t>(t) + 1, 0);
            ++counts[static_cast<std::size_t>(t)];
        }
        return counts;
    }

    int agent_count() const
    {
        return static_cast<int>(std::count_if(occupant.begin(), occupant.end(), [](int t) { return t != kVacant; }));
    }
};

namespace detail {

// Per-cell neighbor tallies by type (the cell's own occupant excluded).
class NeighborTally {
public:
    NeighborTally(int n, int types, double radius)
        : n_(n), disk_(radius), like_(static_cast<std::size_t>(types), std::vector<int>(static_cast<std::size_t>(n * n), 0)),
          occupied_(static_cast<std::size_t>(n * n), 0), r2_(radius * radius)
    {
    }

    void add(std::size_t cell, int type, int delta)
    {
        const Cell c = cell_of(cell);
        disk_.for_each_clipped(n_, c, [&](Cell q) {
            if (q == c) return;
            const auto k = flat(q);
            like_[static_cast<std::size_t>(type)][k] += delta;
            occupied_[k] += delta;
        });
    }

    // Would an agent of `type` be satisfied at `cell`, ignoring the agent standing at `self`?
    bool satisfied(std::size_t cell, int type, std::size_t self, double tolerance) const
    {
        int like = like_[static_cast<std::size_t>(type)][cell];
        int occupied = occupied_[cell];
        if (self != cell && within(cell, self)) {
            --like;
            --occupied;
        }
        if (occupied <= 0) return true;
        return static_cast<double>(like) >= tolerance * static_cast<double>(occupied);
    }

private:
    Cell cell_of(std::size_t idx) const
    {
        return {static_cast<int>(idx % static_cast<std::size_t>(n_)) + 1,
                static_cast<int>(idx / static_cast<std::size_t>(n_)) + 1};
    }
    std::size_t flat(Cell c) const
    {
        return static_cast<std::size_t>(c.j - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(c.i - 1);
    }
    bool within(std::size_t a, std::size_t b) const
    {
        const Cell p = cell_of(a);
        const Cell q = cell_of(b);
        const int di = p.i - q.i;
        const int dj = p.j - q.j;
        return static_cast<double>(di * di + dj * dj) <= r2_;
    }

    int n_;
    DiskStencil disk_;
    std::vector<std::vector<int>> like_;
    std::vector<int> occupied_;
    double r2_;
};

} // namespace detail

// Schelling dynamics restricted to built cells. Agents are placed uniformly at random,
// types assigned round-robin (equal shares, every type present once agents >= types). Each sweep visits agents in a fresh random
// order; an unsatisfied agent moves to a random satisfying vacancy, or to any random
// vacancy when none satisfies it. Stops after a sweep without moves or at max_sweeps.
inline ResidentialState run_schelling(const Lattice& pattern, const SegregationConfig& config, Rng& rng)
{
    config.validate();
    std::vector<std::size_t> built;
    for (std::size_t idx = 0; idx < pattern.cell_count(); ++idx) {
        if (pattern.built(idx)) built.push_back(idx);
    }
    const auto agents = static_cast<std::size_t>(std::lround(config.agent_density * static_cast<double>(built.size())));
    if (agents < 1) throw InputError("pattern too small to hold a residential agent");
    if (agents >= built.size()) throw InputError("no vacant built cell for residential moves");

    ResidentialState state;
    state.size = pattern.size();
    state.occupant.assign(pattern.cell_count(), ResidentialState::kVacant);
    detail::NeighborTally tally(pattern.size(), config.type_count, config.radius);

    rng.shuffle(built);
    std::vector<std::size_t> position(built.begin(), built.begin() + static_cast<std::ptrdiff_t>(agents));
    std::vector<std::size_t> vacant(built.begin() + static_cast<std::ptrdiff_t>(agents), built.end());
    std::vector<std::size_t> slot(pattern.cell_count(), 0); // index of a vacant cell inside `vacant`
    for (std::size_t k = 0; k < vacant.size(); ++k) slot[vacant[k]] = k;
    std::vector<int> type(agents);
    for (std::size_t a = 0; a < agents; ++a) {
        type[a] = static_cast<int>(a % static_cast<std::size_t>(config.type_count));
        state.occupant[position[a]] = type[a];
        tally.add(position[a], type[a], +1);
    }

    std::vector<std::size_t> order(agents);
    std::vector<std::size_t> candidates;
    while (state.sweeps < config.max_sweeps) {
        for (std::size_t a = 0; a < agents; ++a) order[a] = a;
        rng.shuffle(order);
        long moves = 0;
        for (auto a : order) {
            const auto from = position[a];
            if (tally.satisfied(from, type[a], from, config.tolerance)) continue;
            candidates.clear();
            for (auto v : vacant) {
                if (tally.satisfied(v, type[a], from, config.tolerance)) candidates.push_back(v);
            }
            const auto& pool = candidates.empty() ? vacant : candidates;
            const auto to = pool[static_cast<std::size_t>(rng.below(pool.size()))];

            tally.add(from, type[a], -1);
            state.occupant[from] = ResidentialState::kVacant;
            vacant[slot[to]] = from;
            slot[from] = slot[to];
            position[a] = to;
            state.occupant[to] = type[a];
            tally.add(to, type[a], +1);
            ++moves;
        }
        ++state.sweeps;
        state.moves += moves;
        if (moves == 0) {
            state.frozen = true;
            break;
        }
    }
    return state;
}

// H: Moran's I of the per-area type balance over areas holding agents, clipped to
// [0,1]. With two types the balance is (type-0 count - type-1 count); with more, each
// type's count against the mean of the others, averaged over types.
inline double segregation_index(const ResidentialState& state, const Lattice& pattern, const MoranConfig& moran)
{
    moran.validate(pattern.size());
    if (state.agent_count() < 2) throw InputError("segregation index needs at least two agents");
    const int m = moran.partitions;
    const int side = pattern.size() / m;
    const auto counts = state.type_counts();
    const auto types = std::max<std::size_t>(counts.size(), 2);

    std::vector<std::vector<double>> per_area(static_cast<std::size_t>(m * m), std::vector<double>(types, 0.0));
    for (std::size_t idx = 0; idx < state.occupant.size(); ++idx) {
        const int t = state.occupant[idx];
        if (t == ResidentialState::kVacant) continue;
        const Cell c = pattern.cell_at(idx);
        per_area[static_cast<std::size_t>(((c.j - 1) / side) * m + (c.i - 1) / side)][static_cast<std::size_t>(t)] += 1.0;
    }
    const auto all_centroids = area_centroids(pattern.size(), m);
    std::vector<Point> centroids;
    std::vector<const std::vector<double>*> occupied;
    for (std::size_t mu = 0; mu < per_area.size(); ++mu) {
        double total = 0.0;
        for (double x : per_area[mu]) total += x;
        if (total > 0.0) {
            centroids.push_back(all_centroids[mu]);
            occupied.push_back(&per_area[mu]);
        }
    }

    double sum = 0.0;
    for (std::size_t t = 0; t < types; ++t) {
        std::vector<double> balance;
        for (const auto* area : occupied) {
            double others = 0.0;
            for (std::size_t u = 0; u < types; ++u) {
                if (u != t) others += (*area)[u];
            }
            balance.push_back((*area)[t] - others / static_cast<double>(types - 1));
        }
        try {
            sum += moran_index(balance, centroids);
        } catch (const UndefinedMetric&) {
            // uniform balance (or a single occupied area): mixed at area scale
        }
    }
    return std::clamp(sum / static_cast<double>(types), 0.0, 1.0);
}

inline constexpr std::uint64_t kResidentialStream = 0x7363686c6e67ULL;

// H of a finished pattern: residential run seeded from the engine seed, then the index.
inline double residential_segregation(const Lattice& pattern, const SegregationConfig& config, std::uint64_t seed,
                                      int moran_partitions)
{
    Rng rng(derive_seed(seed, kResidentialStream));
    const auto residents = run_schelling(pattern, config, rng);
    return segregation_index(residents, pattern, MoranConfig{moran_partitions});
}

} // namespace morphogen
