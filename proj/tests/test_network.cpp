#include "morphogen/network.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace morphogen;

namespace {
RoadNetwork segment(Point a, Point b)
{
    RoadNetwork net;
    const auto na = net.add_node(a);
    const auto nb = net.add_node(b);
    net.add_edge(na, nb);
    return net;
}
} // namespace

TEST(NearestRoad, PerpendicularOntoEndpoint)
{
    const auto net = segment({0, 0}, {10, 0});
    const auto a = nearest_road({0, 5}, net);
    EXPECT_EQ(a.edge, 0u);
    EXPECT_DOUBLE_EQ(a.offset, 5.0);
    EXPECT_DOUBLE_EQ(a.foot.x, 0.0);
    EXPECT_DOUBLE_EQ(a.foot.y, 0.0);
    EXPECT_DOUBLE_EQ(a.t, 0.0);
}

TEST(NearestRoad, PointOnEdge)
{
    const auto net = segment({0, 0}, {10, 0});
    EXPECT_EQ(nearest_road({4.25, 0}, net).offset, 0.0);
}

TEST(NearestRoad, PicksCloserOfTwoEdges)
{
    RoadNetwork net;
    const auto o = net.add_node({0, 0});
    net.add_edge(o, net.add_node({10, 0}));
    net.add_edge(o, net.add_node({0, 10}));
    const auto a = nearest_road({3, 4}, net);
    EXPECT_EQ(a.edge, 1u);
    EXPECT_DOUBLE_EQ(a.offset, 3.0);
    EXPECT_DOUBLE_EQ(a.foot.x, 0.0);
    EXPECT_DOUBLE_EQ(a.foot.y, 4.0);
}

TEST(NearestRoad, EdgelessNetworkThrows)
{
    RoadNetwork net;
    net.add_node({1, 1});
    EXPECT_THROW(nearest_road({0, 0}, net), StateError);
}

TEST(NetworkDistance, PointOnCenterIsZero)
{
    auto net = segment({0, 0}, {10, 0});
    net.add_center(1, 1);
    EXPECT_EQ(network_distance({10, 0}, net), 0.0);
}

TEST(NetworkDistance, OffsetPlusAlongPath)
{
    auto net = segment({0, 0}, {10, 0});
    net.add_center(1, 1);
    EXPECT_DOUBLE_EQ(network_distance({0, 5}, net), 15.0);
}

TEST(NetworkDistance, Errors)
{
    auto net = segment({0, 0}, {10, 0});
    net.add_center(1, 1);
    EXPECT_THROW(network_distance({0, 5}, net, 2), InputError);
    net.add_edge(net.add_node({20, 20}), net.add_node({30, 20}));
    EXPECT_THROW(network_distance({25, 21}, net), StateError);
}

TEST(NetworkDistance, MatchesAllPairsOracleOnSmallGraphs)
{
    Rng rng(2024);
    for (int g = 0; g < 100; ++g) {
        const auto net = gen::random_graph(rng, 8, 2);
        for (int q = 0; q < 10; ++q) {
            const Point p{rng.uniform(-2.0, 12.0), rng.uniform(-2.0, 12.0)};
            EXPECT_NEAR(network_distance(p, net), oracle::network_distance(p, net), 1e-9);
            for (int a : {1, 2}) {
                EXPECT_NEAR(network_distance(p, net, a), oracle::network_distance(p, net, a), 1e-9);
            }
        }
    }
}

TEST(Accessibility, SingleActivityEqualsNetworkDistance)
{
    Rng rng(4);
    for (int g = 0; g < 20; ++g) {
        const auto net = gen::random_graph(rng, 8, 1);
        const Point p{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
        EXPECT_DOUBLE_EQ(accessibility_d4(p, net, 3.0), network_distance(p, net));
    }
}

TEST(Accessibility, PNormOfPerActivityDistances)
{
    EXPECT_DOUBLE_EQ(pnorm_of_distances({2.5, 2.5, 2.5}, 7.0), 2.5);
    EXPECT_NEAR(pnorm_of_distances({3.0, 4.0}, 3.0), std::cbrt(45.5), 1e-14);
    EXPECT_NEAR(pnorm_of_distances({3.0, 4.0}, 3.0), 3.5700, 1e-4);

    // d3 = 3 to the activity-1 center, 4 to the activity-2 center
    RoadNetwork net;
    const auto a = net.add_node({-3, 0});
    const auto o = net.add_node({0, 0});
    const auto b = net.add_node({4, 0});
    net.add_edge(a, o);
    net.add_edge(o, b);
    net.add_center(a, 1);
    net.add_center(b, 2);
    EXPECT_NEAR(accessibility_d4({0, 0}, net, 3.0), std::cbrt(45.5), 1e-14);
}

TEST(Accessibility, MissingActivityThrows)
{
    auto net = segment({0, 0}, {10, 0});
    net.add_center(0, 1);
    net.set_activity_count(2);
    EXPECT_FALSE(covers_all_activities(net));
    EXPECT_THROW(accessibility_d4({1, 1}, net, 3.0), InputError);
}

TEST(NetworkFields, BatchEqualsPerPointQueries)
{
    Rng rng(99);
    for (int g = 0; g < 10; ++g) {
        const auto net = gen::random_graph(rng, 10, 2, 12.0);
        ExplicativeFields f;
        fill_network_fields(f, 12, net, 3.0);
        Lattice l(12);
        for (std::size_t idx = 0; idx < l.cell_count(); ++idx) {
            const Point p = centroid(l.cell_at(idx));
            EXPECT_NEAR(f.d2[idx], oracle::road_distance(p, net), 1e-12);
            EXPECT_NEAR(f.d3[idx], network_distance(p, net), 1e-12);
            EXPECT_NEAR(f.d4[idx], accessibility_d4(p, net, 3.0), 1e-12);
        }
    }
}

TEST(ConnectCell, NoOpWhenAlreadyOnRoad)
{
    auto net = segment({0, 0}, {10, 0});
    EXPECT_FALSE(connect_cell({5, 1e-10}, net));
    EXPECT_EQ(net.edges().size(), 1u);
    EXPECT_EQ(net.nodes().size(), 2u);
}

TEST(ConnectCell, OrthogonalBranchSplitsEdge)
{
    auto net = segment({0, 0}, {10, 0});
    ASSERT_TRUE(connect_cell({5, 3}, net));
    EXPECT_EQ(net.edges().size(), 3u);
    ASSERT_EQ(net.nodes().size(), 4u);
    EXPECT_EQ(net.nodes()[2], (Point{5, 0}));
    EXPECT_EQ(net.nodes()[3], (Point{5, 3}));
    EXPECT_DOUBLE_EQ(net.total_length(), 13.0);
    EXPECT_EQ(nearest_road({5, 3}, net).offset, 0.0);
}

TEST(ConnectCell, EndpointFootAttachesWithoutSplit)
{
    auto net = segment({0, 0}, {10, 0});
    ASSERT_TRUE(connect_cell({12, 4}, net));
    EXPECT_EQ(net.nodes().size(), 3u);
    EXPECT_EQ(net.edges().size(), 2u);
    EXPECT_EQ(net.edges()[1].a, 1u);
}

TEST(ConnectCell, SplittingPreservesExistingDistances)
{
    Rng rng(17);
    for (int g = 0; g < 30; ++g) {
        auto net = gen::random_graph(rng, 8, 2);
        std::vector<Point> probes;
        std::vector<double> before;
        for (int q = 0; q < 5; ++q) {
            probes.push_back({rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)});
        }
        const auto cd_before = center_distances(net);
        const std::size_t old_nodes = net.nodes().size();
        const double old_len = net.total_length();
        const Point tip{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
        const double offset = nearest_road(tip, net).offset;
        connect_cell(tip, net);
        EXPECT_NEAR(net.total_length(), old_len + offset, 1e-9);
        EXPECT_TRUE(net.connected());
        const auto cd_after = center_distances(net);
        for (std::size_t k = 0; k < old_nodes; ++k) EXPECT_NEAR(cd_after.dist[k], cd_before.dist[k], 1e-9);
    }
}

TEST(RandomNetwork, SingleCenterHasNoEdges)
{
    Rng rng(1);
    const auto net = init_random_network({{{3, 3}, 1}}, 0, 10, rng);
    EXPECT_EQ(net.nodes().size(), 1u);
    EXPECT_TRUE(net.edges().empty());
    EXPECT_TRUE(net.connected());
}

TEST(RandomNetwork, TwoNodesLinkedOnce)
{
    Rng rng(1);
    const auto net = init_random_network({{{0, 0}, 1}, {{7, 0}, 2}}, 0, 10, rng);
    ASSERT_EQ(net.edges().size(), 1u);
    EXPECT_DOUBLE_EQ(net.edges()[0].length, 7.0);
}

TEST(RandomNetwork, DeterministicForSeed)
{
    const std::vector<CenterPlacement> centers{{{5.5, 5.5}, 1}, {{40.5, 8.5}, 2}, {{20.5, 30.5}, 1}, {{50.5, 50.5}, 2}};
    Rng r1(77), r2(77);
    const auto a = init_random_network(centers, 10, 56, r1);
    const auto b = init_random_network(centers, 10, 56, r2);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(a.nodes().size(), 14u);
}

TEST(RandomNetwork, IsConnectedMinimumSpanningTree)
{
    // Brute check against Prim's algorithm on the complete Euclidean graph.
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CenterPlacement> centers;
        for (int k = 0; k < 3; ++k) centers.push_back({{rng.uniform(0.0, 30.0), rng.uniform(0.0, 30.0)}, k % 2 + 1});
        const auto net = init_random_network(centers, 6, 30, rng);
        EXPECT_TRUE(net.connected());
        EXPECT_EQ(net.edges().size(), net.nodes().size() - 1);
        const auto& nodes = net.nodes();
        std::vector<bool> in(nodes.size(), false);
        std::vector<double> key(nodes.size(), 1e300);
        key[0] = 0.0;
        double mst = 0.0;
        for (std::size_t it = 0; it < nodes.size(); ++it) {
            std::size_t u = nodes.size();
            for (std::size_t v = 0; v < nodes.size(); ++v)
                if (!in[v] && (u == nodes.size() || key[v] < key[u])) u = v;
            in[u] = true;
            mst += key[u];
            for (std::size_t v = 0; v < nodes.size(); ++v)
                if (!in[v]) key[v] = std::min(key[v], std::hypot(nodes[u].x - nodes[v].x, nodes[u].y - nodes[v].y));
        }
        EXPECT_NEAR(net.total_length(), mst, 1e-9);
    }
}

TEST(RandomNetwork, ZeroCentersRejected)
{
    Rng rng(1);
    EXPECT_THROW(init_random_network({}, 3, 10, rng), InputError);
}
