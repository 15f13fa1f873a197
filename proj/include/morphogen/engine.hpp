#pragma once

#include "morphogen/error.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/metrics.hpp"
#include "morphogen/network.hpp"
#include "morphogen/random.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace morphogen {

struct EngineConfig {
    WeightVector weights{{1.0, 0.0, 0.0, 0.0}};
    int n_per_step = 15;
    double theta2 = 5.0; // maximum isolation distance
    double rho = 5.0;    // density neighborhood radius
    double p4 = 3.0;
    double pD = 3.0;
    double pS = 3.0;
    double pA = 3.0;
    int steps = 30;
    std::uint64_t seed = 0;

    void validate() const
    {
        weights.validate();
        if (n_per_step < 1) throw ConfigError("n_per_step must be >= 1");
        if (steps < 1) throw ConfigError("steps must be >= 1");
        if (!(theta2 > 0.0)) throw ConfigError("theta2 must be > 0");
        if (!(rho > 0.0)) throw ConfigError("rho must be > 0");
        for (double p : {p4, pD, pS, pA}) {
            if (!(p >= 1.0)) throw ConfigError("norm exponents must be >= 1");
        }
    }

    MetricParams metric_params(int moran_partitions) const
    {
        return {rho, p4, pD, pS, pA, moran_partitions};
    }
};

// The world at one time step. `fields` reflects the lattice and network as of the
// last refresh_fields call.
struct SimulationState {
    Lattice lattice;
    RoadNetwork network;
    ExplicativeFields fields;
    int step_index = 0;

    SimulationState(Lattice l, RoadNetwork n) : lattice(std::move(l)), network(std::move(n)) {}

    // Phase (a): d1 is kept incrementally, network-derived fields are recomputed only
    // when the network changed since the previous refresh.
    void refresh_fields(const EngineConfig& config)
    {
        if (!density_ || density_->radius() != config.rho) density_.emplace(lattice, config.rho);
        density_->fill(fields.d1);
        if (network.version() != fields_version_ || config.p4 != fields_p4_) {
            fill_network_fields(fields, lattice.size(), network, config.p4);
            fields_version_ = network.version();
            fields_p4_ = config.p4;
        }
    }

    void build(std::size_t idx)
    {
        if (lattice.build(idx) && density_) density_->add(lattice.cell_at(idx));
    }

private:
    std::optional<DensityField> density_;
    std::uint64_t fields_version_ = std::numeric_limits<std::uint64_t>::max();
    double fields_p4_ = 0.0;
};

struct StepReport {
    std::vector<Cell> built; // placement order
    int branches = 0;
};

// Checks everything a run needs before the first step.
inline void validate_run(const SimulationState& state, const EngineConfig& config)
{
    config.validate();
    const auto& net = state.network;
    if (net.centers().empty()) throw ConfigError("scenario has no center");
    if (net.edges().empty()) throw ConfigError("scenario network has no edge");
    if (!net.connected()) throw ConfigError("scenario network is not connected");
    if (config.weights.alpha[3] > 0.0 && !covers_all_activities(net)) {
        throw ConfigError("accessibility weight is set but some activity has no center");
    }
}

// One growth step: (a) refresh fields and land values, (b) build the n best empty
// cells, (c) branch a road to each new cell farther than theta2 from the network.
inline StepReport step(SimulationState& state, const EngineConfig& config, Rng& rng)
{
    if (state.step_index >= config.steps) throw StateError("simulation already reached its last step");
    StepReport report;

    state.refresh_fields(config);
    const auto value = land_value_field(state.lattice, state.fields, config.weights).v;

    std::vector<std::size_t> empty;
    for (std::size_t idx = 0; idx < state.lattice.cell_count(); ++idx) {
        if (!state.lattice.built(idx)) empty.push_back(idx);
    }
    const auto n = static_cast<std::size_t>(config.n_per_step);
    auto better = [&](std::size_t a, std::size_t b) {
        return value[a] != value[b] ? value[a] > value[b] : a < b;
    };

    std::vector<std::size_t> chosen;
    if (empty.size() <= n) {
        chosen = empty;
        std::sort(chosen.begin(), chosen.end(), better);
    } else {
        std::vector<double> ranked;
        ranked.reserve(empty.size());
        for (auto idx : empty) ranked.push_back(value[idx]);
        std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n - 1), ranked.end(),
                         std::greater<>());
        const double cutoff = ranked[n - 1];

        std::vector<std::size_t> tied;
        for (auto idx : empty) {
            if (value[idx] > cutoff) {
                chosen.push_back(idx);
            } else if (value[idx] == cutoff) {
                tied.push_back(idx);
            }
        }
        std::sort(chosen.begin(), chosen.end(), better);
        const std::size_t remaining = n - chosen.size();
        rng.sample_front(tied, remaining);
        chosen.insert(chosen.end(), tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(remaining));
    }

    for (auto idx : chosen) {
        state.build(idx);
        report.built.push_back(state.lattice.cell_at(idx));
    }

    for (const Cell c : report.built) {
        const Point p = centroid(c);
        if (nearest_road(p, state.network).offset > config.theta2) {
            if (connect_cell(p, state.network)) ++report.branches;
        }
    }

    ++state.step_index;
    return report;
}

using BuildLog = std::vector<std::vector<Cell>>;
using StepObserver = std::function<void(const SimulationState&, const StepReport&)>;

struct Simulation {
    SimulationState state;
    BuildLog log;
};

// Steps until config.steps or until the lattice is full.
inline Simulation simulate(SimulationState initial, const EngineConfig& config, const StepObserver& observer = {})
{
    validate_run(initial, config);
    Simulation sim{std::move(initial), {}};
    Rng rng(derive_seed(config.seed, 0x656e67696e65ULL));
    while (sim.state.step_index < config.steps &&
           sim.state.lattice.built_count() < static_cast<int>(sim.state.lattice.cell_count())) {
        auto report = step(sim.state, config, rng);
        if (observer) observer(sim.state, report);
        sim.log.push_back(std::move(report.built));
    }
    return sim;
}

struct SimulationResult {
    SimulationState state;
    MetricVector metrics;
    BuildLog log;
    EngineConfig config;
    std::uint64_t seed = 0;
    int moran_partitions = 0;
};

inline SimulationResult run(SimulationState initial, const EngineConfig& config, int moran_partitions = 0,
                            const StepObserver& observer = {})
{
    if (moran_partitions == 0) moran_partitions = default_moran_partitions(initial.lattice.size());
    MoranConfig{moran_partitions}.validate(initial.lattice.size());
    auto sim = simulate(std::move(initial), config, observer);
    auto metrics = compute_metrics(sim.state.lattice, sim.state.network, config.metric_params(moran_partitions));
    return {std::move(sim.state), metrics, std::move(sim.log), config, config.seed, moran_partitions};
}

inline Lattice replay(int size, const BuildLog& log)
{
    Lattice out(size);
    for (const auto& placed : log) {
        for (const Cell c : placed) out.build(c);
    }
    return out;
}

struct Difference {
    Lattice pattern;
    int size = 0;
};

// Cells built in exactly one of the two patterns.
inline Difference symmetric_difference(const Lattice& a, const Lattice& b)
{
    if (a.size() != b.size()) throw InputError("symmetric difference of lattices with different sizes");
    Difference d{Lattice(a.size()), 0};
    for (std::size_t idx = 0; idx < a.cell_count(); ++idx) {
        if (a.built(idx) != b.built(idx)) {
            d.pattern.build(idx);
            ++d.size;
        }
    }
    return d;
}

inline Difference symmetric_difference(const SimulationResult& a, const SimulationResult& b)
{
    return symmetric_difference(a.state.lattice, b.state.lattice);
}

} // namespace morphogen
