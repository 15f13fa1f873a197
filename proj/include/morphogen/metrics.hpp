#pragma once

#include "morphogen/error.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace morphogen {

struct MetricVector {
    double D = 0.0; // integrated density
    double I = 0.0; // Moran's I
    double S = 0.0; // relative speed
    double A = 0.0; // global accessibility
    std::optional<double> H; // segregation, when a residential stage ran
};

// (mean of x^p)^(1/p).
inline double pnorm_mean(std::span<const double> values, double p)
{
    if (values.empty()) throw UndefinedMetric("p-norm of an empty set");
    double s = 0.0;
    for (double x : values) s += std::pow(x, p);
    return std::pow(s / static_cast<double>(values.size()), 1.0 / p);
}

namespace detail {
inline std::vector<std::size_t> built_indices(const Lattice& lattice)
{
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(lattice.built_count()));
    for (std::size_t idx = 0; idx < lattice.cell_count(); ++idx) {
        if (lattice.built(idx)) out.push_back(idx);
    }
    if (out.empty()) throw UndefinedMetric("metric needs at least one built cell");
    return out;
}
} // namespace detail

// D: p-norm of d1 over built cells.
inline double integrated_density(const Lattice& lattice, double rho, double pD)
{
    const auto built = detail::built_indices(lattice);
    const DensityField density(lattice, rho);
    std::vector<double> d1;
    d1.reserve(built.size());
    for (auto idx : built) d1.push_back(density.value(idx));
    return pnorm_mean(d1, pD);
}

// M x M partition of the lattice into square areas of N / M cells per side.
struct MoranConfig {
    int partitions = 7;

    void validate(int n) const
    {
        if (partitions < 2 || partitions >= n) {
            throw InputError("Moran partition count must satisfy 1 < M < N (got M=" +
                             std::to_string(partitions) + ", N=" + std::to_string(n) + ")");
        }
        if (n % partitions != 0) {
            throw InputError("lattice size " + std::to_string(n) + " is not divisible by M=" +
                             std::to_string(partitions));
        }
    }
};

// Divisor M of N (1 < M < N) whose areas are closest to 8 cells per side; larger M on ties.
inline int default_moran_partitions(int n)
{
    int best = 0;
    double best_gap = 0.0;
    for (int m = 2; m < n; ++m) {
        if (n % m != 0) continue;
        const double gap = std::abs(static_cast<double>(n / m) - 8.0);
        if (best == 0 || gap <= best_gap) {
            best = m;
            best_gap = gap;
        }
    }
    if (best == 0) throw InputError("lattice size " + std::to_string(n) + " has no admissible Moran partition");
    return best;
}

// Moran's I with inverse-distance weights between area centroids, normalized by the
// number of areas over the total weight.
inline double moran_index(std::span<const double> values, std::span<const Point> centroids)
{
    const std::size_t n = values.size();
    if (n != centroids.size()) throw InputError("Moran values and centroids differ in length");
    if (n < 2) throw UndefinedMetric("Moran's I needs at least two areas");
    if (std::all_of(values.begin(), values.end(), [&](double x) { return x == values[0]; })) {
        throw UndefinedMetric("Moran's I undefined: zero variance across areas");
    }
    double mean = 0.0;
    for (double x : values) mean += x;
    mean /= static_cast<double>(n);

    double cross = 0.0;
    double total_weight = 0.0;
    double variance = 0.0;
    for (std::size_t mu = 0; mu < n; ++mu) {
        const double zm = values[mu] - mean;
        variance += zm * zm;
        for (std::size_t nu = mu + 1; nu < n; ++nu) {
            const double w = 1.0 / distance(centroids[mu], centroids[nu]);
            cross += w * zm * (values[nu] - mean);
            total_weight += w;
        }
    }
    // symmetric weights: each unordered pair counts twice in both sums, which cancels
    return static_cast<double>(n) / total_weight * cross / variance;
}

inline std::vector<double> area_counts(const Lattice& lattice, int partitions)
{
    const int side = lattice.size() / partitions;
    std::vector<double> counts(static_cast<std::size_t>(partitions * partitions), 0.0);
    for (std::size_t idx = 0; idx < lattice.cell_count(); ++idx) {
        if (!lattice.built(idx)) continue;
        const Cell c = lattice.cell_at(idx);
        const int a = (c.i - 1) / side;
        const int b = (c.j - 1) / side;
        counts[static_cast<std::size_t>(b * partitions + a)] += 1.0;
    }
    return counts;
}

inline std::vector<Point> area_centroids(int n, int partitions)
{
    const double side = static_cast<double>(n / partitions);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(partitions * partitions));
    for (int b = 0; b < partitions; ++b) {
        for (int a = 0; a < partitions; ++a) out.push_back({(a + 0.5) * side, (b + 0.5) * side});
    }
    return out;
}

inline double moran_index(const Lattice& lattice, const MoranConfig& config)
{
    config.validate(lattice.size());
    const auto counts = area_counts(lattice, config.partitions);
    const auto centroids = area_centroids(lattice.size(), config.partitions);
    return moran_index(counts, centroids);
}

// S: p-norm over built cells of d3 / e3, e3 being the straight-line distance to the
// center realizing d3.
inline double relative_speed(const Lattice& lattice, const RoadNetwork& net, double pS)
{
    const auto built = detail::built_indices(lattice);
    const auto cd = center_distances(net);
    std::vector<double> ratios;
    ratios.reserve(built.size());
    for (auto idx : built) {
        const Point p = centroid(lattice.cell_at(idx));
        const auto route = route_via(nearest_road(p, net), net, cd);
        const double e3 = distance(p, net.node(route.center));
        // d3 >= e3 by the triangle inequality; the clamp only absorbs rounding
        ratios.push_back(e3 > 0.0 ? std::max(1.0, route.length / e3) : 1.0);
    }
    return pnorm_mean(ratios, pS);
}

// A: p-norm over built cells of d4 / max d4 (max over built cells). Zero if every
// built cell has d4 = 0.
inline double global_accessibility(const Lattice& lattice, const RoadNetwork& net, double p4, double pA)
{
    const auto built = detail::built_indices(lattice);
    if (!covers_all_activities(net)) throw UndefinedMetric("accessibility needs a center for every activity");
    const int amax = net.activity_count();
    std::vector<CenterDistances> per_activity;
    for (int a = 1; a <= amax; ++a) per_activity.push_back(center_distances(net, a));

    std::vector<double> d4(built.size());
    std::vector<double> scratch(per_activity.size());
    for (std::size_t k = 0; k < built.size(); ++k) {
        const auto access = nearest_road(centroid(lattice.cell_at(built[k])), net);
        for (std::size_t a = 0; a < per_activity.size(); ++a) {
            scratch[a] = route_via(access, net, per_activity[a]).length;
        }
        d4[k] = pnorm_of_distances(scratch, p4);
    }
    const double peak = *std::max_element(d4.begin(), d4.end());
    if (peak == 0.0) return 0.0;
    for (double& x : d4) x /= peak;
    return pnorm_mean(d4, pA);
}

// lambda = a_max * (inverse-distance weight of center pairs with different activities)
//                / (inverse-distance weight of all center pairs)
inline double heterogeneity_lambda(const std::vector<CenterPlacement>& centers, int activity_count)
{
    if (centers.size() < 2) throw InputError("heterogeneity needs at least two centers");
    double mixed = 0.0;
    double total = 0.0;
    for (std::size_t a = 0; a < centers.size(); ++a) {
        for (std::size_t b = a + 1; b < centers.size(); ++b) {
            const double d = distance(centers[a].position, centers[b].position);
            if (!(d > 0.0)) throw InputError("coincident centers in heterogeneity index");
            total += 1.0 / d;
            if (centers[a].activity != centers[b].activity) mixed += 1.0 / d;
        }
    }
    return static_cast<double>(activity_count) * mixed / total;
}

struct MetricParams {
    double rho = 5.0;
    double p4 = 3.0;
    double pD = 3.0;
    double pS = 3.0;
    double pA = 3.0;
    int moran_partitions = 7;
};

inline MetricVector compute_metrics(const Lattice& lattice, const RoadNetwork& net, const MetricParams& params)
{
    MetricVector m;
    m.D = integrated_density(lattice, params.rho, params.pD);
    m.I = moran_index(lattice, MoranConfig{params.moran_partitions});
    m.S = relative_speed(lattice, net, params.pS);
    m.A = global_accessibility(lattice, net, params.p4, params.pA);
    return m;
}

} // namespace morphogen
