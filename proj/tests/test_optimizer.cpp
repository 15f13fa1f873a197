#include "morphogen/optimizer.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace morphogen;

TEST(Enumerate, Counts)
{
    EXPECT_EQ(enumerate_assignments(9).size(), 510u);
    EXPECT_EQ(enumerate_assignments(3).size(), 6u);
    const auto two = enumerate_assignments(2);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(to_string(two[0]), "01");
    EXPECT_EQ(to_string(two[1]), "10");
    EXPECT_THROW(enumerate_assignments(1), InputError);
}

TEST(Enumerate, LexicographicWithoutUniformCases)
{
    const auto all = enumerate_assignments(6);
    std::set<std::string> seen;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto s = to_string(all[k]);
        EXPECT_NE(s, "000000");
        EXPECT_NE(s, "111111");
        EXPECT_TRUE(seen.insert(s).second);
        if (k > 0) {
            EXPECT_LT(to_string(all[k - 1]), s);
        }
    }
}

namespace {
std::vector<Objectives> as_objectives(const std::vector<std::pair<double, double>>& pts)
{
    std::vector<Objectives> out;
    for (auto [a, b] : pts) out.push_back({a, b});
    return out;
}

std::vector<std::pair<double, double>> random_points(Rng& rng, int n, bool coarse)
{
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < n; ++k) {
        double a = rng.uniform(), b = rng.uniform();
        if (coarse) {
            a = std::floor(a * 10) / 10;
            b = std::floor(b * 10) / 10;
        }
        pts.emplace_back(a, b);
    }
    return pts;
}
} // namespace

TEST(Pareto, Examples)
{
    EXPECT_EQ(pareto_flags(as_objectives({{0.3, 0.9}})), std::vector<bool>{true});
    EXPECT_EQ(pareto_flags(as_objectives({{1, 2}, {2, 1}, {2, 2}})), (std::vector<bool>{true, true, false}));
    EXPECT_EQ(pareto_flags(as_objectives({{1, 1}, {1, 1}, {1, 2}})), (std::vector<bool>{true, true, false}));
}

TEST(Pareto, MatchesBruteForce)
{
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto pts = random_points(rng, 200, t % 2 == 0);
        EXPECT_EQ(pareto_flags(as_objectives(pts)), oracle::pareto(pts));
    }
}

TEST(Pareto, StreamingArchiveEqualsBatch)
{
    Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto pts = random_points(rng, 120, t % 2 == 0);
        ParetoArchive archive;
        for (std::size_t k = 0; k < pts.size(); ++k) archive.offer(k, {pts[k].first, pts[k].second});
        const auto flags = pareto_flags(as_objectives(pts));
        std::vector<std::size_t> batch;
        for (std::size_t k = 0; k < flags.size(); ++k)
            if (flags[k]) batch.push_back(k);
        EXPECT_EQ(archive.members(), batch);
    }
}

TEST(Pareto, InvariantUnderMonotoneTransforms)
{
    Rng rng(3);
    for (int t = 0; t < 30; ++t) {
        const auto pts = random_points(rng, 100, t % 2 == 0);
        auto moved = pts;
        for (auto& [a, b] : moved) {
            a = std::exp(3 * a);
            b = b * b * b + 2;
        }
        EXPECT_EQ(pareto_flags(as_objectives(pts)), pareto_flags(as_objectives(moved)));
    }
}

TEST(Heterogeneity, AlternatingIsMaximalOnALine)
{
    std::vector<Point> line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    double best = -1.0;
    std::string best_bits;
    for (const auto& bits : enumerate_assignments(4)) {
        std::vector<CenterPlacement> centers;
        for (std::size_t k = 0; k < 4; ++k) centers.push_back({line[k], bits[k] ? 2 : 1});
        const double lam = heterogeneity_lambda(centers, 2);
        // direct evaluation: weighted mixed pairs over weighted pairs, times a_max
        double mixed = 0, total = 0;
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = a + 1; b < 4; ++b) {
                const double w = 1.0 / std::abs(line[a].x - line[b].x);
                total += w;
                if (bits[a] != bits[b]) mixed += w;
            }
        EXPECT_NEAR(lam, 2 * mixed / total, 1e-14);
        if (lam > best + 1e-12) {
            best = lam;
            best_bits = to_string(bits);
        }
    }
    EXPECT_TRUE(best_bits == "0101" || best_bits == "1010") << best_bits;
}

namespace {
ZoningScenario small_district()
{
    ZoningScenario z;
    z.scenario.world_size = 16;
    for (Point p : {Point{3.5, 3.5}, Point{12.5, 3.5}, Point{3.5, 12.5}, Point{12.5, 12.5}}) {
        z.scenario.centers.push_back({p, 1, true});
    }
    z.scenario.centers.push_back({{0.5, 15.5}, 3, false});
    z.scenario.network = NetworkSpec{{}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}, {2, 4}}};
    z.engine.n_per_step = 8;
    z.engine.steps = 8;
    z.segregation.agent_density = 0.3;
    z.segregation.tolerance = 0.5;
    z.moran_partitions = 4;
    z.base_seed = 5;
    return z;
}
} // namespace

TEST(Zoning, ComplementHasSameLambda)
{
    const auto z = small_district();
    const auto records = optimize(z, 1);
    ASSERT_EQ(records.size(), 14u);
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& mirror = records[records.size() - 1 - k];
        for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(records[k].bits[b], 1 - mirror.bits[b]);
        EXPECT_NEAR(records[k].lambda, mirror.lambda, 1e-14);
    }
}

TEST(Zoning, CommonSeedGivesZeroVariance)
{
    auto z = small_district();
    z.common_seed = true;
    const auto rec = evaluate_assignment({1, 0, 0, 1}, z, 3);
    ASSERT_EQ(rec.H_values.size(), 3u);
    EXPECT_EQ(rec.H_std, 0.0);
    EXPECT_EQ(rec.A_std, 0.0);
    EXPECT_GE(rec.A_mean, 0.0);
    EXPECT_LE(rec.A_mean, 1.0);
}

TEST(Zoning, LambdaCountsStationAsThirdActivity)
{
    const auto z = small_district();
    const auto rec = evaluate_assignment({0, 0, 0, 1}, z, 1);
    auto centers = assigned_centers(z, {0, 0, 0, 1});
    EXPECT_EQ(centers[4].activity, 3);
    EXPECT_NEAR(rec.lambda, heterogeneity_lambda(centers, 3), 1e-15);
}

TEST(Zoning, FrontIsNonEmptyAndConsistent)
{
    const auto z = small_district();
    const auto records = optimize(z, 2, 2);
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records) {
        ASSERT_TRUE(r.valid());
        pts.emplace_back(r.H_mean, r.A_mean);
    }
    const auto expect = oracle::pareto(pts);
    int members = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        EXPECT_EQ(records[k].pareto, expect[k]);
        members += records[k].pareto ? 1 : 0;
    }
    EXPECT_GT(members, 0);
}

TEST(Zoning, StationExclusionKeepsItAsPlainNode)
{
    auto z = small_district();
    z.station_in_accessibility = false;
    const auto state = zoning_state(z, {0, 1, 1, 0});
    EXPECT_EQ(state.network.centers().size(), 4u);
    EXPECT_EQ(state.network.nodes().size(), 5u);
    EXPECT_EQ(state.network.activity_count(), 2);
}

TEST(Zoning, ScenarioValidation)
{
    auto z = small_district();
    z.scenario.network.reset();
    EXPECT_THROW(z.validate(), InputError);
    auto y = small_district();
    for (auto& c : y.scenario.centers) c.assignable = false;
    y.scenario.centers[0].assignable = true;
    EXPECT_THROW(y.validate(), InputError);
}
