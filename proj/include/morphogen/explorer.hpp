#pragma once

#include "morphogen/engine.hpp"
#include "morphogen/error.hpp"
#include "morphogen/metrics.hpp"
#include "morphogen/parallel.hpp"
#include "morphogen/random.hpp"
#include "morphogen/scenario.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morphogen {

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<int> counts;
};

struct ReplicateStats {
    double mean = 0.0;
    double std = 0.0; // sample (n - 1) standard deviation; 0 for a single value
    std::size_t count = 0;
    Histogram histogram;
};

// Fixed-width histogram over the observed range; a constant sample lands in bin 0.
inline ReplicateStats replicate_stats(std::span<const double> values, int bins = 20)
{
    if (values.empty()) throw InputError("replicate statistics of an empty sample");
    if (bins < 1) throw InputError("histogram needs at least one bin");
    ReplicateStats s;
    s.count = values.size();
    double lo = values[0];
    double hi = values[0];
    for (double x : values) {
        if (!std::isfinite(x)) throw InputError("replicate statistics need finite values");
        s.mean += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    s.mean /= static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double x : values) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
    }
    s.histogram = {lo, hi, std::vector<int>(static_cast<std::size_t>(bins), 0)};
    for (double x : values) {
        int b = hi > lo ? static_cast<int>((x - lo) / (hi - lo) * bins) : 0;
        b = std::clamp(b, 0, bins - 1);
        ++s.histogram.counts[static_cast<std::size_t>(b)];
    }
    return s;
}

// Trials needed for a 95% confidence interval of total length `ci_length` on a mean
// with standard deviation sigma: ceil((2 * 1.96 * sigma / ci_length)^2), at least 1.
inline int required_trials(double sigma, double ci_length)
{
    if (!(sigma >= 0.0) || !(ci_length > 0.0)) throw InputError("required_trials needs sigma >= 0 and ci_length > 0");
    const double ratio = 2.0 * sigma * 1.96 / ci_length;
    return std::max(1, static_cast<int>(std::ceil(ratio * ratio - 1e-9)));
}

// Number of grid levels per axis (1/step + 1), requiring step to divide 1.
inline int alpha_levels(double step)
{
    if (!(step > 0.0 && step <= 1.0)) throw InputError("alpha step must lie in (0,1]");
    const double k = 1.0 / step;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-9) throw InputError("alpha step must divide 1 exactly");
    return static_cast<int>(rounded) + 1;
}

// Every point of {0, step, ..., 1}^4 except the origin, lexicographic with alpha1 major.
inline std::vector<WeightVector> alpha_grid(double step)
{
    const int levels = alpha_levels(step);
    const int k = levels - 1;
    std::vector<WeightVector> out;
    for (int a = 0; a < levels; ++a) {
        for (int b = 0; b < levels; ++b) {
            for (int c = 0; c < levels; ++c) {
                for (int d = 0; d < levels; ++d) {
                    if (a + b + c + d == 0) continue;
                    out.push_back({{static_cast<double>(a) / k, static_cast<double>(b) / k,
                                    static_cast<double>(c) / k, static_cast<double>(d) / k}});
                }
            }
        }
    }
    return out;
}

// Seed of one design cell: independent of run order and of the other cells.
inline std::uint64_t run_seed(std::uint64_t base, std::size_t alpha_index, std::size_t replicate)
{
    return derive_seed(base, alpha_index, replicate);
}

struct SweepPlan {
    double step = 0.2;
    int replicates = 5;
    EngineConfig base;
    ScenarioSpec scenario;
    std::uint64_t base_seed = 0;
    int moran_partitions = 0; // 0: default for the world size
    int jobs = 1;

    void validate() const
    {
        alpha_levels(step);
        if (replicates < 1) throw InputError("replicates must be >= 1");
        scenario.validate();
    }
};

inline constexpr std::array<const char*, 4> kMetricNames{"D", "I", "S", "A"};

struct Replicate {
    std::uint64_t seed = 0;
    std::optional<MetricVector> metrics;
    std::string error; // set when metrics is empty
};

struct SweepRecord {
    std::size_t alpha_index = 0;
    WeightVector alpha;
    std::vector<Replicate> replicates;
    std::array<std::optional<ReplicateStats>, 4> stats; // D, I, S, A over valid replicates
    int excluded = 0;

    std::vector<double> values(std::size_t metric) const
    {
        std::vector<double> out;
        for (const auto& r : replicates) {
            if (!r.metrics) continue;
            const auto& m = *r.metrics;
            const std::array<double, 4> v{m.D, m.I, m.S, m.A};
            out.push_back(v[metric]);
        }
        return out;
    }
};

inline void aggregate(SweepRecord& rec)
{
    rec.excluded = 0;
    for (const auto& r : rec.replicates) rec.excluded += r.metrics ? 0 : 1;
    for (std::size_t m = 0; m < 4; ++m) {
        const auto v = rec.values(m);
        rec.stats[m] = v.empty() ? std::nullopt : std::optional(replicate_stats(v));
    }
}

inline std::vector<SweepRecord> sweep(const SweepPlan& plan)
{
    plan.validate();
    const auto grid = alpha_grid(plan.step);
    const int moran = plan.moran_partitions ? plan.moran_partitions : default_moran_partitions(plan.scenario.world_size);
    std::vector<SweepRecord> records(grid.size());
    const auto reps = static_cast<std::size_t>(plan.replicates);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        records[p].alpha_index = p;
        records[p].alpha = grid[p];
        records[p].replicates.resize(reps);
    }
    parallel_for(grid.size() * reps, plan.jobs, [&](std::size_t job) {
        const std::size_t p = job / reps;
        const std::size_t r = job % reps;
        auto& rep = records[p].replicates[r];
        rep.seed = run_seed(plan.base_seed, p, r);
        EngineConfig config = plan.base;
        config.weights = grid[p];
        config.seed = rep.seed;
        try {
            rep.metrics = run(instantiate(plan.scenario, rep.seed), config, moran).metrics;
        } catch (const Error& e) {
            rep.error = e.what();
        }
    });
    for (auto& rec : records) aggregate(rec);
    return records;
}

struct DiffRecord {
    std::size_t alpha_index = 0;
    WeightVector alpha;
    std::vector<int> sizes; // |Delta| per replicate
    double mean_size = 0.0;
    double D = 0.0;         // replicate mean of D(Delta); failed projections count as 0
    double I = 0.0;         // replicate mean of I(Delta); failed projections count as 0
    double significance = 0.0;
    int projection_errors = 0;
};

struct DiffPlan {
    std::vector<WeightVector> alphas;
    EngineConfig base;
    ScenarioSpec scenario;
    int n_parallel = 20;
    int replicates = 3;
    std::uint64_t base_seed = 0;
    int moran_partitions = 0;
    int jobs = 1;
    double density_radius = 0.05; // (D, I)-plane radius for the local density of points
};

// Sequential (n = 1, steps * n_parallel) and parallel (n = n_parallel, steps) runs from
// the same seed and initial state build the same number of cells; Delta is their
// symmetric difference.
inline std::vector<DiffRecord> scheme_difference_map(const DiffPlan& plan)
{
    if (plan.n_parallel < 1) throw InputError("n_parallel must be >= 1");
    if (plan.replicates < 1) throw InputError("replicates must be >= 1");
    plan.scenario.validate();
    const int moran = plan.moran_partitions ? plan.moran_partitions : default_moran_partitions(plan.scenario.world_size);
    const auto reps = static_cast<std::size_t>(plan.replicates);

    struct Cellwise {
        int size = 0;
        double D = 0.0;
        double I = 0.0;
        bool failed = false;
    };
    std::vector<Cellwise> cells(plan.alphas.size() * reps);
    parallel_for(cells.size(), plan.jobs, [&](std::size_t job) {
        const std::size_t p = job / reps;
        const std::size_t r = job % reps;
        const auto seed = run_seed(plan.base_seed, p, r);
        EngineConfig par = plan.base;
        par.weights = plan.alphas[p];
        par.seed = seed;
        par.n_per_step = plan.n_parallel;
        EngineConfig seq = par;
        seq.n_per_step = 1;
        seq.steps = plan.base.steps * plan.n_parallel;

        const auto initial = instantiate(plan.scenario, seed);
        const auto a = simulate(initial, seq).state.lattice;
        const auto b = simulate(initial, par).state.lattice;
        const auto delta = symmetric_difference(a, b);
        auto& out = cells[job];
        out.size = delta.size;
        try {
            out.D = integrated_density(delta.pattern, plan.base.rho, plan.base.pD);
            out.I = moran_index(delta.pattern, MoranConfig{moran});
        } catch (const UndefinedMetric&) {
            out.D = 0.0;
            out.I = 0.0;
            out.failed = true;
        }
    });

    std::vector<DiffRecord> records(plan.alphas.size());
    for (std::size_t p = 0; p < records.size(); ++p) {
        auto& rec = records[p];
        rec.alpha_index = p;
        rec.alpha = plan.alphas[p];
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& c = cells[p * reps + r];
            rec.sizes.push_back(c.size);
            rec.mean_size += c.size;
            rec.D += c.D;
            rec.I += c.I;
            rec.projection_errors += c.failed ? 1 : 0;
        }
        rec.mean_size /= static_cast<double>(reps);
        rec.D /= static_cast<double>(reps);
        rec.I /= static_cast<double>(reps);
    }
    // significance = (number of other points within density_radius) * mean |Delta|
    for (auto& rec : records) {
        int near = 0;
        for (const auto& other : records) {
            if (&other == &rec) continue;
            if (std::hypot(other.D - rec.D, other.I - rec.I) <= plan.density_radius) ++near;
        }
        rec.significance = near * rec.mean_size;
    }
    return records;
}

} // namespace morphogen
