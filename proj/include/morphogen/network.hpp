#pragma once

#include "morphogen/error.hpp"
#include "morphogen/geometry.hpp"
#include "morphogen/grid.hpp"
#include "morphogen/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace morphogen {

using NodeId = std::size_t;
using EdgeId = std::size_t;

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();
inline constexpr double kCoincidenceTolerance = 1e-9;

struct Edge {
    NodeId a = 0;
    NodeId b = 0;
    double length = 0.0;
};

struct Center {
    NodeId node = 0;
    int activity = 1;
};

// Planar Euclidean road graph. Nodes are points in cell-side units; a subset of
// nodes are centers carrying an activity in [1, activity_count()].
class RoadNetwork {
public:
    NodeId add_node(Point p)
    {
        nodes_.push_back(p);
        ++version_;
        return nodes_.size() - 1;
    }

    EdgeId add_edge(NodeId a, NodeId b)
    {
        check_node(a);
        check_node(b);
        if (a == b) throw InputError("self-loop edge on node " + std::to_string(a));
        const double len = distance(nodes_[a], nodes_[b]);
        if (!(len > 0.0)) throw InputError("zero-length edge between coincident nodes");
        edges_.push_back({a, b, len});
        ++version_;
        return edges_.size() - 1;
    }

    void add_center(NodeId node, int activity)
    {
        check_node(node);
        if (activity < 1) throw InputError("center activity must be >= 1");
        for (const auto& c : centers_) {
            if (c.node == node) throw InputError("node " + std::to_string(node) + " is already a center");
        }
        centers_.push_back({node, activity});
        ++version_;
    }

    // a_max. Defaults to the largest activity carried by a center.
    int activity_count() const noexcept
    {
        int amax = activity_count_;
        for (const auto& c : centers_) amax = std::max(amax, c.activity);
        return amax;
    }
    void set_activity_count(int n)
    {
        if (n < 0) throw InputError("activity count must be >= 0");
        activity_count_ = n;
        ++version_;
    }

    // Splits edge e at `foot` (which must lie on it): e keeps its first endpoint and
    // ends at the new node, a new edge carries the remainder. Returns the new node.
    NodeId split_edge(EdgeId e, Point foot)
    {
        const NodeId b = edges_.at(e).b;
        const NodeId f = add_node(foot);
        edges_[e].b = f;
        edges_[e].length = distance(nodes_[edges_[e].a], foot);
        add_edge(f, b);
        return f;
    }

    const std::vector<Point>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const std::vector<Center>& centers() const noexcept { return centers_; }
    Point node(NodeId id) const { return nodes_.at(id); }

    // Bumped on every mutation; used to invalidate derived fields.
    std::uint64_t version() const noexcept { return version_; }

    double total_length() const noexcept
    {
        double s = 0.0;
        for (const auto& e : edges_) s += e.length;
        return s;
    }

    std::size_t component_count() const
    {
        std::vector<std::size_t> parent(nodes_.size());
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        std::size_t comps = nodes_.size();
        for (const auto& e : edges_) {
            const auto ra = find(e.a);
            const auto rb = find(e.b);
            if (ra != rb) {
                parent[ra] = rb;
                --comps;
            }
        }
        return comps;
    }

    bool connected() const { return component_count() <= 1; }

    friend bool operator==(const RoadNetwork& x, const RoadNetwork& y)
    {
        auto same_edges = std::equal(x.edges_.begin(), x.edges_.end(), y.edges_.begin(), y.edges_.end(),
                                     [](const Edge& p, const Edge& q) {
                                         return p.a == q.a && p.b == q.b && p.length == q.length;
                                     });
        auto same_centers = std::equal(x.centers_.begin(), x.centers_.end(), y.centers_.begin(),
                                       y.centers_.end(), [](const Center& p, const Center& q) {
                                           return p.node == q.node && p.activity == q.activity;
                                       });
        return x.nodes_ == y.nodes_ && same_edges && same_centers &&
               x.activity_count() == y.activity_count();
    }

private:
    void check_node(NodeId id) const
    {
        if (id >= nodes_.size()) throw InputError("node index " + std::to_string(id) + " out of range");
    }

    std::vector<Point> nodes_;
    std::vector<Edge> edges_;
    std::vector<Center> centers_;
    int activity_count_ = 0;
    std::uint64_t version_ = 0;
};

// Where a point joins the network: its perpendicular foot on the nearest edge.
struct AccessPoint {
    EdgeId edge = 0;
    double t = 0.0;      // position along edge a->b
    Point foot;
    double offset = 0.0; // d2
};

// Nearest edge by point-to-segment distance; ties go to the lowest edge index.
inline AccessPoint nearest_road(Point p, const RoadNetwork& net)
{
    if (net.edges().empty()) throw StateError("nearest_road on a network without edges");
    AccessPoint best;
    best.offset = std::numeric_limits<double>::infinity();
    const auto& nodes = net.nodes();
    for (EdgeId e = 0; e < net.edges().size(); ++e) {
        const auto& edge = net.edges()[e];
        const auto proj = project_onto_segment(p, nodes[edge.a], nodes[edge.b]);
        if (proj.distance < best.offset) best = {e, proj.t, proj.foot, proj.distance};
    }
    return best;
}

// Shortest along-network distance from every node to the nearest qualifying center,
// and which center realizes it. Equal distances resolve to the lowest center node id.
struct CenterDistances {
    std::vector<double> dist;
    std::vector<NodeId> source;
};

inline CenterDistances center_distances(const RoadNetwork& net, std::optional<int> activity = std::nullopt)
{
    const std::size_t n = net.nodes().size();
    CenterDistances out{std::vector<double>(n, std::numeric_limits<double>::infinity()),
                        std::vector<NodeId>(n, kNoNode)};

    // CSR adjacency.
    std::vector<std::size_t> offset(n + 1, 0);
    for (const auto& e : net.edges()) {
        ++offset[e.a + 1];
        ++offset[e.b + 1];
    }
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    std::vector<std::pair<NodeId, double>> adj(offset[n]);
    {
        auto fill = offset;
        for (const auto& e : net.edges()) {
            adj[fill[e.a]++] = {e.b, e.length};
            adj[fill[e.b]++] = {e.a, e.length};
        }
    }

    using Label = std::tuple<double, NodeId, NodeId>; // (distance, source center, node)
    std::priority_queue<Label, std::vector<Label>, std::greater<>> queue;
    bool any = false;
    for (const auto& c : net.centers()) {
        if (activity && c.activity != *activity) continue;
        any = true;
        if (std::make_pair(0.0, c.node) < std::make_pair(out.dist[c.node], out.source[c.node])) {
            out.dist[c.node] = 0.0;
            out.source[c.node] = c.node;
            queue.emplace(0.0, c.node, c.node);
        }
    }
    if (!any) {
        throw InputError(activity ? "no center with activity " + std::to_string(*activity)
                                  : std::string("network has no center"));
    }

    while (!queue.empty()) {
        const auto [d, src, u] = queue.top();
        queue.pop();
        if (d != out.dist[u] || src != out.source[u]) continue;
        for (std::size_t k = offset[u]; k < offset[u + 1]; ++k) {
            const auto [w, len] = adj[k];
            const double nd = d + len;
            if (std::make_pair(nd, src) < std::make_pair(out.dist[w], out.source[w])) {
                out.dist[w] = nd;
                out.source[w] = src;
                queue.emplace(nd, src, w);
            }
        }
    }
    return out;
}

struct Route {
    double length = 0.0; // d2 + along-network part
    NodeId center = kNoNode;
};

// Best route through the access foot-point, treated as a temporary node splitting its edge.
inline Route route_via(const AccessPoint& access, const RoadNetwork& net, const CenterDistances& cd)
{
    const auto& e = net.edges()[access.edge];
    const double via_a = access.t * e.length + cd.dist[e.a];
    const double via_b = (1.0 - access.t) * e.length + cd.dist[e.b];
    Route r;
    if (std::make_pair(via_a, cd.source[e.a]) <= std::make_pair(via_b, cd.source[e.b])) {
        r = {via_a, cd.source[e.a]};
    } else {
        r = {via_b, cd.source[e.b]};
    }
    if (!std::isfinite(r.length)) throw StateError("network is disconnected: no path to a center");
    r.length += access.offset;
    return r;
}

inline Route network_route(Point p, const RoadNetwork& net, std::optional<int> activity = std::nullopt)
{
    const auto cd = center_distances(net, activity);
    return route_via(nearest_road(p, net), net, cd);
}

// d3 (activity unset) or d3(.; a).
inline double network_distance(Point p, const RoadNetwork& net, std::optional<int> activity = std::nullopt)
{
    return network_route(p, net, activity).length;
}

// Mean-then-root p-norm of the per-activity network distances.
inline double pnorm_of_distances(const std::vector<double>& d3_per_activity, double p)
{
    double s = 0.0;
    for (double x : d3_per_activity) s += std::pow(x, p);
    return std::pow(s / static_cast<double>(d3_per_activity.size()), 1.0 / p);
}

inline void check_activity_coverage(const RoadNetwork& net)
{
    const int amax = net.activity_count();
    if (amax < 1) throw InputError("network has no center");
    std::vector<bool> seen(static_cast<std::size_t>(amax) + 1, false);
    for (const auto& c : net.centers()) seen[static_cast<std::size_t>(c.activity)] = true;
    for (int a = 1; a <= amax; ++a) {
        if (!seen[static_cast<std::size_t>(a)]) {
            throw InputError("activity " + std::to_string(a) + " has no center");
        }
    }
}

inline bool covers_all_activities(const RoadNetwork& net)
{
    try {
        check_activity_coverage(net);
        return true;
    } catch (const InputError&) {
        return false;
    }
}

// d4 at a point.
inline double accessibility_d4(Point p, const RoadNetwork& net, double p4)
{
    if (!(p4 >= 1.0)) throw InputError("p4 must be >= 1");
    check_activity_coverage(net);
    const auto access = nearest_road(p, net);
    std::vector<double> d3s;
    for (int a = 1; a <= net.activity_count(); ++a) {
        d3s.push_back(route_via(access, net, center_distances(net, a)).length);
    }
    return pnorm_of_distances(d3s, p4);
}

// Fills d2, d3, d3_center, d3_by_activity and d4 for every cell of an N x N lattice.
// d4 is left empty when some activity has no center.
inline void fill_network_fields(ExplicativeFields& fields, int n, const RoadNetwork& net, double p4)
{
    const Lattice shape(n);
    const std::size_t cells = shape.cell_count();
    fields.d2.resize(cells);
    fields.d3.resize(cells);
    fields.d3_center.resize(cells);

    const auto any = center_distances(net);
    const bool covered = covers_all_activities(net);
    const int amax = covered ? net.activity_count() : 0;
    std::vector<CenterDistances> per_activity;
    for (int a = 1; a <= amax; ++a) per_activity.push_back(center_distances(net, a));
    fields.d3_by_activity.assign(per_activity.size(), std::vector<double>(cells));
    if (covered) {
        fields.d4.resize(cells);
    } else {
        fields.d4.clear();
    }

    std::vector<double> scratch(per_activity.size());
    for (std::size_t idx = 0; idx < cells; ++idx) {
        const auto access = nearest_road(centroid(shape.cell_at(idx)), net);
        const auto r = route_via(access, net, any);
        fields.d2[idx] = access.offset;
        fields.d3[idx] = r.length;
        fields.d3_center[idx] = r.center;
        for (std::size_t a = 0; a < per_activity.size(); ++a) {
            scratch[a] = route_via(access, net, per_activity[a]).length;
            fields.d3_by_activity[a][idx] = scratch[a];
        }
        if (covered) fields.d4[idx] = pnorm_of_distances(scratch, p4);
    }
}

// Joins a point to the network by a road branching orthogonally off its nearest edge.
// Returns false when the point already lies on the network (no branch needed).
inline bool connect_cell(Point p, RoadNetwork& net)
{
    const auto access = nearest_road(p, net);
    if (access.offset <= kCoincidenceTolerance) return false;
    const auto& e = net.edges()[access.edge];
    NodeId foot;
    if (distance(access.foot, net.node(e.a)) <= kCoincidenceTolerance) {
        foot = e.a;
    } else if (distance(access.foot, net.node(e.b)) <= kCoincidenceTolerance) {
        foot = e.b;
    } else {
        foot = net.split_edge(access.edge, access.foot);
    }
    const NodeId tip = net.add_node(p);
    net.add_edge(foot, tip);
    return true;
}

struct CenterPlacement {
    Point position;
    int activity = 1;
};

// Centers become nodes 0..C-1, then `extra_node_count` nodes are dropped uniformly in
// [0, N]^2. Components are merged over a link radius growing one cell side per round:
// within a round, node pairs closer than the radius that still sit in different
// components are linked shortest first. Stops once a single component remains.
inline RoadNetwork init_random_network(const std::vector<CenterPlacement>& centers, int extra_node_count,
                                       int world_size, Rng& rng)
{
    if (centers.empty()) throw InputError("random network needs at least one center");
    if (extra_node_count < 0) throw InputError("extra node count must be >= 0");
    RoadNetwork net;
    for (const auto& c : centers) {
        const NodeId id = net.add_node(c.position);
        net.add_center(id, c.activity);
    }
    for (int k = 0; k < extra_node_count; ++k) {
        const double x = rng.uniform(0.0, static_cast<double>(world_size));
        const double y = rng.uniform(0.0, static_cast<double>(world_size));
        net.add_node({x, y});
    }

    const auto& nodes = net.nodes();
    const std::size_t n = nodes.size();
    struct Pair {
        double d;
        NodeId a, b;
    };
    std::vector<Pair> pairs;
    pairs.reserve(n * (n - 1) / 2);
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            const double d = distance(nodes[a], nodes[b]);
            if (!(d > 0.0)) throw InputError("coincident nodes in random network");
            pairs.push_back({d, a, b});
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return std::tie(x.d, x.a, x.b) < std::tie(y.d, y.a, y.b);
    });

    std::vector<NodeId> parent(n);
    std::iota(parent.begin(), parent.end(), NodeId{0});
    auto find = [&](NodeId x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t components = n;
    std::size_t next = 0;
    for (double radius = 1.0; components > 1; radius += 1.0) {
        for (; next < pairs.size() && pairs[next].d <= radius; ++next) {
            const auto ra = find(pairs[next].a);
            const auto rb = find(pairs[next].b);
            if (ra == rb) continue;
            net.add_edge(pairs[next].a, pairs[next].b);
            parent[ra] = rb;
            --components;
        }
    }
    return net;
}

} // namespace morphogen
