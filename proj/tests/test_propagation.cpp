// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/propagation.hpp"
#include "skyloss/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace skyloss;

namespace {

double closed_form_fspl(double d_m, double f_hz)
{
    return 32.45 + 20.0 * std::log10(f_hz / 1e6) + 20.0 * std::log10(d_m / 1e3);
}

// Clear when no sample point along the segment is inside any box grown by
// `margin`; blocked when some sample point is inside a box shrunk by `margin`.
enum class Sampled { clear, blocked, unsure };

Sampled sample_segment(const Point3& a, const Point3& b, const Scene& s, double margin)
{
    bool near = false;
    for (int k = 1; k < 1000; ++k) {
        const double t = k / 1000.0;
        const double x = a.x + t * (b.x - a.x), y = a.y + t * (b.y - a.y), z = a.z + t * (b.z - a.z);
        for (const auto& bd : s.buildings) {
            if (x > bd.x_min + margin && x < bd.x_max - margin && y > bd.y_min + margin && y < bd.y_max - margin &&
                z > margin && z < bd.height - margin)
                return Sampled::blocked;
            if (x > bd.x_min - margin && x < bd.x_max + margin && y > bd.y_min - margin && y < bd.y_max + margin &&
                z < bd.height + margin)
                near = true;
        }
    }
    return near ? Sampled::unsure : Sampled::clear;
}

Scene random_scene(std::uint64_t seed, double p = 0.6, double gamma = 25.0)
{
    SceneGenConfig c;
    c.p_building = p;
    c.gamma = gamma;
    return generate_scene(c, seed);
}

} // namespace

TEST(Fspl, ReferenceValues)
{
    EXPECT_NEAR(fspl(1000.0, 900e6), 91.53, 0.01);
    EXPECT_NEAR(fspl(100.0, 900e6), 71.53, 0.01);
    EXPECT_NEAR(fspl(1000.0, 900e6), closed_form_fspl(1000.0, 900e6), 0.01);
}

TEST(Fspl, DecadeAddsTwentyDb)
{
    for (double d : {1.0, 37.5, 420.0})
        EXPECT_NEAR(fspl(10.0 * d, 2.4e9) - fspl(d, 2.4e9), 20.0, 1e-12);
}

TEST(Fspl, StrictlyIncreasing)
{
    double prev = -1e9;
    for (double d = 1.0; d < 5000.0; d *= 1.37) {
        EXPECT_GT(fspl(d, 900e6), prev);
        prev = fspl(d, 900e6);
    }
    EXPECT_LT(fspl(100.0, 800e6), fspl(100.0, 900e6));
}

TEST(Fspl, RejectsNonPositiveArguments)
{
    EXPECT_THROW(fspl(0.0, 900e6), DomainError);
    EXPECT_THROW(fspl(-1.0, 900e6), DomainError);
    EXPECT_THROW(fspl(10.0, 0.0), DomainError);
}

TEST(LosBlockages, HandExample)
{
    Scene s;
    s.extent = 1800.0;
    s.buildings.push_back({90, -10, 110, 10, 30});
    // Ray height at x = 100 is 40 - 38.5 * 0.5 = 20.75 < 30.
    const auto hits = los_blockages({0, 0, 40}, {200, 0, 1.5}, s);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0], s.buildings[0]);

    s.buildings[0].height = 18.0; // lowest ray height over the footprint is 18.825
    EXPECT_TRUE(los_blockages({0, 0, 40}, {200, 0, 1.5}, s).empty());
}

TEST(LosBlockages, EmptySceneAndVerticalLink)
{
    EXPECT_TRUE(los_blockages({900, 900, 40}, {100, 100, 1.5}, Scene{}).empty());
    Scene s;
    s.buildings.push_back({500, 500, 600, 600, 100});
    EXPECT_TRUE(los_blockages({900, 900, 40}, {900, 900, 1.5}, s).empty());
}

TEST(LosBlockages, RoofGrazeDoesNotBlock)
{
    Scene s;
    // z = 40 - 0.2 x stays above the roof except at the far edge x = 100.
    s.buildings.push_back({80, -10, 100, 10, 20});
    EXPECT_TRUE(los_blockages({0, 0, 40}, {200, 0, 0}, s).empty());
}

TEST(LosBlockages, CountsEveryBuildingCrossed)
{
    Scene s;
    for (int i = 0; i < 4; ++i)
        s.buildings.push_back({100.0 + 100 * i, -20, 150.0 + 100 * i, 20, 60});
    EXPECT_EQ(los_blockages({0, 0, 30}, {600, 0, 1.5}, s).size(), 4u);
    EXPECT_EQ(BlockageIndex(s).count({0, 0, 30}, {600, 0, 1.5}), 4u);
}

TEST(LosBlockages, AgreesWithDenseSampling)
{
    Rng rng(31);
    int decided = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Scene s = random_scene(seed);
        const BlockageIndex index(s);
        for (int q = 0; q < 300; ++q) {
            const Point3 tx{rng.uniform(0, 1800), rng.uniform(0, 1800), rng.uniform(20, 150)};
            const Point3 rx{rng.uniform(0, 1800), rng.uniform(0, 1800), 1.5};
            const std::size_t exact = los_blockages(tx, rx, s).size();
            ASSERT_EQ(index.count(tx, rx), exact);
            switch (sample_segment(tx, rx, s, 1.0)) {
            case Sampled::clear:
                ASSERT_EQ(exact, 0u) << "sampling says clear with a 1 m margin";
                ++decided;
                break;
            case Sampled::blocked:
                ASSERT_GT(exact, 0u) << "sampling found a point deep inside a building";
                ++decided;
                break;
            case Sampled::unsure:
                break;
            }
        }
    }
    EXPECT_GT(decided, 3000);
}

TEST(Simulate, EmptySceneIsFreeSpace)
{
    const Scene s;
    const ReceiverGrid g = receiver_grid(s, 40);
    TxConfig tx;
    tx.altitude = 80.0;
    const PathLossMap m = simulate(s, g, tx, NlosModel{});
    const Point3 t = tx.position(s.extent);
    EXPECT_EQ(t.x, 900.0);
    EXPECT_EQ(t.y, 900.0);
    for (std::size_t k = 0; k < g.size(); ++k)
        EXPECT_EQ(m.values[k], fspl(distance(t, g.positions[k]), tx.frequency));
}

TEST(Simulate, ReceiverBelowTransmitter)
{
    Scene s;
    s.extent = 20.0;
    const ReceiverGrid g = receiver_grid(s, 2); // receivers at 5 and 15
    TxConfig tx;
    tx.altitude = 40.0;
    tx.x = 5.0;
    tx.y = 5.0;
    const PathLossMap m = simulate(s, g, tx, NlosModel{});
    EXPECT_NEAR(m.values[0], fspl(38.5, 900e6), 1e-12);
    EXPECT_NEAR(m.values[0], 63.25, 0.01);
}

TEST(Simulate, BlockageAddsExcessLoss)
{
    Scene s;
    s.buildings.push_back({1000, 880, 1040, 920, 100});
    const ReceiverGrid g = receiver_grid(s, 60); // spacing 30 m
    TxConfig tx;
    tx.altitude = 40.0;
    const NlosModel nlos;
    const PathLossMap m = simulate(s, g, tx, nlos);
    const BlockageIndex index(s);
    const Point3 t = tx.position(s.extent);
    int blocked = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.indoor[k]) {
            EXPECT_TRUE(std::isnan(m.values[k]));
            continue;
        }
        const double free = fspl(distance(t, g.positions[k]), tx.frequency);
        const std::size_t n = index.count(t, g.positions[k]);
        EXPECT_NEAR(m.values[k] - free, n == 0 ? 0.0 : 20.0, 1e-9);
        blocked += n > 0;
    }
    EXPECT_GT(blocked, 0);
}

TEST(NlosModel, ExcessIsCapped)
{
    const NlosModel n;
    EXPECT_EQ(n.excess_db(0), 0.0);
    EXPECT_EQ(n.excess_db(1), 20.0);
    EXPECT_EQ(n.excess_db(2), 40.0);
    EXPECT_EQ(n.excess_db(7), 40.0);
    NlosModel bad;
    bad.eta_cap = 10.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(BatchSimulate, OneMapPerAltitude)
{
    const Scene s = random_scene(5);
    const ReceiverGrid g = receiver_grid(s, 30);
    const std::vector<double> alts{40, 80, 120, 300};
    const auto maps = batch_simulate(s, g, alts, TxConfig{}, NlosModel{});
    ASSERT_EQ(maps.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(maps[i].altitude, alts[i]);
        TxConfig tx;
        tx.altitude = alts[i];
        const PathLossMap single = simulate(s, g, tx, NlosModel{});
        for (std::size_t k = 0; k < g.size(); ++k)
            if (!g.indoor[k])
                EXPECT_EQ(maps[i].values[k], single.values[k]);
    }
    const std::vector<double> bad{80, 40};
    EXPECT_THROW(batch_simulate(s, g, bad, TxConfig{}, NlosModel{}), ConfigError);
}

TEST(BatchSimulate, EmptySceneIncreasesWithAltitude)
{
    const Scene s;
    const ReceiverGrid g = receiver_grid(s, 25);
    const std::vector<double> alts{40, 80, 120, 300};
    const auto maps = batch_simulate(s, g, alts, TxConfig{}, NlosModel{});
    for (std::size_t k = 0; k < g.size(); ++k)
        for (std::size_t i = 1; i < maps.size(); ++i)
            EXPECT_GT(maps[i].values[k], maps[i - 1].values[k]);
}

TEST(BatchSimulate, HigherTransmitterNeverAddsBlockages)
{
    Rng rng(8);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        SceneGenConfig c;
        c.p_building = 0.8;
        c.gamma = 30.0;
        c.h_max = 100.0;
        const Scene s = generate_scene(c, seed);
        const BlockageIndex index(s);
        for (int q = 0; q < 400; ++q) {
            const Point3 rx{rng.uniform(0, 1800), rng.uniform(0, 1800), 1.5};
            std::size_t prev = std::numeric_limits<std::size_t>::max();
            for (double h : {110.0, 160.0, 300.0, 1500.0}) {
                const std::size_t n = index.count({900, 900, h}, rx);
                EXPECT_LE(n, prev);
                prev = n;
            }
        }
    }
}

TEST(PathLossCsv, Format)
{
    Scene s;
    s.extent = 20.0;
    s.buildings.push_back({0, 0, 10, 10, 5});
    const ReceiverGrid g = receiver_grid(s, 2);
    const PathLossMap m = simulate(s, g, TxConfig{}, NlosModel{});
    std::istringstream in(path_loss_csv(m, g));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "i,j,x,y,indoor,pl_db");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,5,5,1,");
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 11), "0,1,5,15,0,");
    EXPECT_EQ(line.size() - line.find('.') - 1, 4u); // four decimals
}

TEST(TxConfig, Validation)
{
    TxConfig tx;
    tx.altitude = 0.0;
    EXPECT_THROW(tx.validate(), ConfigError);
    tx = {};
    tx.frequency = -1.0;
    EXPECT_THROW(tx.validate(), ConfigError);
}
