#pragma once

// Independent reference computations used by the unit and acceptance suites. None of
// these call into the code paths they check.

#include "morphogen/geometry.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/network.hpp"
#include "morphogen/random.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

using morphogen::Point;

// d3 by Floyd-Warshall on the graph with the access foot-point inserted as a node.
// The nearest edge is found by brute force with its own point-to-segment formula.
inline double network_distance(Point p, const morphogen::RoadNetwork& net, std::optional<int> activity = std::nullopt)
{
    const auto& nodes = net.nodes();
    const auto& edges = net.edges();
    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best_edge = 0;
    Point best_foot;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Point a = nodes[edges[e].a];
        const Point b = nodes[edges[e].b];
        const double vx = b.x - a.x, vy = b.y - a.y;
        double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy);
        t = std::fmin(1.0, std::fmax(0.0, t));
        const Point f{a.x + t * vx, a.y + t * vy};
        const double d = std::sqrt((p.x - f.x) * (p.x - f.x) + (p.y - f.y) * (p.y - f.y));
        if (d < best_d2) {
            best_d2 = d;
            best_edge = e;
            best_foot = f;
        }
    }
    const std::size_t n = nodes.size() + 1;
    const std::size_t foot = nodes.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, inf));
    for (std::size_t k = 0; k < n; ++k) dist[k][k] = 0.0;
    auto link = [&](std::size_t a, std::size_t b, double len) {
        dist[a][b] = std::fmin(dist[a][b], len);
        dist[b][a] = std::fmin(dist[b][a], len);
    };
    auto euclid = [](Point a, Point b) { return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)); };
    for (const auto& e : edges) link(e.a, e.b, euclid(nodes[e.a], nodes[e.b]));
    link(foot, edges[best_edge].a, euclid(best_foot, nodes[edges[best_edge].a]));
    link(foot, edges[best_edge].b, euclid(best_foot, nodes[edges[best_edge].b]));
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (dist[i][k] + dist[k][j] < dist[i][j]) dist[i][j] = dist[i][k] + dist[k][j];
    double best = inf;
    for (const auto& c : net.centers()) {
        if (activity && c.activity != *activity) continue;
        best = std::fmin(best, dist[foot][c.node]);
    }
    return best_d2 + best;
}

// Moran's I straight from its definition: ordered pairs mu != nu over the M x M areas,
// centroid distances in cell units.
inline double moran(const morphogen::Lattice& l, int m)
{
    const int n = l.size();
    const int side = n / m;
    std::vector<double> P(static_cast<std::size_t>(m * m), 0.0);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (l.built(morphogen::Cell{i, j})) P[static_cast<std::size_t>(((i - 1) / side) * m + (j - 1) / side)] += 1.0;
    double mean = 0.0;
    for (double x : P) mean += x;
    mean /= static_cast<double>(P.size());
    double w_sum = 0.0, cov = 0.0, var = 0.0;
    for (int a1 = 0; a1 < m; ++a1)
        for (int b1 = 0; b1 < m; ++b1) {
            const double z1 = P[static_cast<std::size_t>(a1 * m + b1)] - mean;
            var += z1 * z1;
            for (int a2 = 0; a2 < m; ++a2)
                for (int b2 = 0; b2 < m; ++b2) {
                    if (a1 == a2 && b1 == b2) continue;
                    const double dx = (a1 - a2) * side, dy = (b1 - b2) * side;
                    const double w = 1.0 / std::sqrt(dx * dx + dy * dy);
                    w_sum += w;
                    cov += w * z1 * (P[static_cast<std::size_t>(a2 * m + b2)] - mean);
                }
        }
    return static_cast<double>(m * m) / w_sum * cov / var;
}

// O(n^2) dominance check under minimization.
inline std::vector<bool> pareto(const std::vector<std::pair<double, double>>& pts)
{
    std::vector<bool> out(pts.size(), true);
    for (std::size_t r = 0; r < pts.size(); ++r)
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (q == r) continue;
            const bool le = pts[q].first <= pts[r].first && pts[q].second <= pts[r].second;
            const bool lt = pts[q].first < pts[r].first || pts[q].second < pts[r].second;
            if (le && lt) {
                out[r] = false;
                break;
            }
        }
    return out;
}

// Euclidean distance from p to the nearest point of any edge, by brute force.
inline double road_distance(Point p, const morphogen::RoadNetwork& net)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : net.edges()) {
        const Point a = net.nodes()[e.a], b = net.nodes()[e.b];
        const double vx = b.x - a.x, vy = b.y - a.y;
        double t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / (vx * vx + vy * vy);
        t = std::fmin(1.0, std::fmax(0.0, t));
        best = std::fmin(best, std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy));
    }
    return best;
}

} // namespace oracle

namespace gen {

// Connected random graph: random spanning tree plus a few extra chords, random centers.
inline morphogen::RoadNetwork random_graph(morphogen::Rng& rng, int max_nodes, int activities, double extent = 10.0)
{
    morphogen::RoadNetwork net;
    const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_nodes - 1)));
    for (int k = 0; k < n; ++k) net.add_node({rng.uniform(0.0, extent), rng.uniform(0.0, extent)});
    for (int k = 1; k < n; ++k) net.add_edge(static_cast<std::size_t>(k), rng.below(static_cast<std::uint64_t>(k)));
    const int chords = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    for (int c = 0; c < chords; ++c) {
        const auto a = rng.below(static_cast<std::uint64_t>(n));
        const auto b = rng.below(static_cast<std::uint64_t>(n));
        if (a != b) net.add_edge(a, b);
    }
    std::vector<std::size_t> ids(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < ids.size(); ++k) ids[k] = k;
    rng.shuffle(ids);
    const int centers = std::min<int>(n, activities + static_cast<int>(rng.below(2)));
    for (int k = 0; k < centers; ++k) net.add_center(ids[static_cast<std::size_t>(k)], k % activities + 1);
    return net;
}

inline morphogen::Lattice random_lattice(morphogen::Rng& rng, int n, double fill)
{
    morphogen::Lattice l(n);
    for (std::size_t idx = 0; idx < l.cell_count(); ++idx) {
        if (rng.uniform() < fill) l.build(idx);
    }
    return l;
}

} // namespace gen
