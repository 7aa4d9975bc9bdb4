// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/errors.hpp"
#include "skyloss/histogram.hpp"
#include "skyloss/propagation.hpp"
#include "skyloss/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

using namespace skyloss;

namespace {

// Reference histogram by explicit edge comparison.
std::array<double, kBins> brute_force(const std::vector<double>& values)
{
    std::array<double, kBins> counts{};
    for (double v : values) {
        int bin = -1;
        if (v < 53.5)
            bin = 0;
        else if (v >= 128.5)
            bin = 25;
        else
            for (int k = 0; k < kBins; ++k)
                if (v >= 53.5 + 3.0 * k && v < 56.5 + 3.0 * k)
                    bin = k;
        counts[static_cast<std::size_t>(bin)] += 1.0;
    }
    for (auto& c : counts)
        c /= static_cast<double>(values.size());
    return counts;
}

PathLossMap map_from(std::vector<double> values, std::vector<std::uint8_t> indoor, double altitude = 40.0)
{
    PathLossMap m;
    m.n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(values.size()))));
    m.altitude = altitude;
    m.values = std::move(values);
    m.indoor = std::move(indoor);
    return m;
}

} // namespace

TEST(Bins, CentersAndEdges)
{
    EXPECT_EQ(bin_center(0), 55.0);
    EXPECT_EQ(bin_center(25), 130.0);
    EXPECT_EQ(lower_edge(1), 56.5);
    EXPECT_EQ(bin_index(56.5), 1);
    EXPECT_EQ(bin_index(std::nextafter(56.5, 0.0)), 0);
    EXPECT_EQ(bin_index(-1e9), 0);
    EXPECT_EQ(bin_index(128.5), 25);
    EXPECT_EQ(bin_index(std::nextafter(128.5, 0.0)), 24);
}

TEST(Quantize, SingleValue)
{
    const std::vector<double> v(9, 55.0);
    const std::vector<std::uint8_t> in(9, 0);
    const auto d = quantize_values(v, in);
    EXPECT_EQ(d.bins[0], 1.0);
    EXPECT_EQ(d.total(), 1.0);
}

TEST(Quantize, EdgeSplit)
{
    const std::vector<double> v{56.4, 56.6};
    const std::vector<std::uint8_t> in(2, 0);
    const auto d = quantize_values(v, in);
    EXPECT_EQ(d.bins[0], 0.5);
    EXPECT_EQ(d.bins[1], 0.5);
}

TEST(Quantize, ClampHigh)
{
    const std::vector<double> v{200.0};
    const std::vector<std::uint8_t> in{0};
    EXPECT_EQ(quantize_values(v, in).bins[25], 1.0);
}

TEST(Quantize, IndoorExcluded)
{
    const std::vector<double> v{60.0, std::nan(""), 90.0, 1000.0};
    const std::vector<std::uint8_t> in{0, 1, 0, 1};
    const auto d = quantize_values(v, in);
    EXPECT_EQ(d.bins[bin_index(60.0)], 0.5);
    EXPECT_EQ(d.bins[bin_index(90.0)], 0.5);
}

TEST(Quantize, Errors)
{
    const std::vector<double> v{60.0, 70.0};
    const std::vector<std::uint8_t> all_in{1, 1};
    EXPECT_THROW(quantize_values(v, all_in), DegenerateInputError);
    const std::vector<double> bad{60.0, std::numeric_limits<double>::infinity()};
    const std::vector<std::uint8_t> out{0, 0};
    EXPECT_THROW(quantize_values(bad, out), DomainError);
}

TEST(Quantize, MatchesBruteForceIncludingEdges)
{
    Rng rng(12);
    const std::vector<double> special{53.5, std::nextafter(56.5, 0.0), 56.5, 128.5, std::nextafter(128.5, 0.0),
                                      53.4999999, 127.0, 0.0, 500.0};
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<double> v(n);
        for (auto& x : v) {
            const double u = rng.uniform();
            if (u < 0.2)
                x = special[rng.below(special.size())];
            else if (u < 0.4)
                x = 53.5 + 3.0 * static_cast<double>(rng.below(27)); // exact edges
            else
                x = rng.uniform(40.0, 145.0);
        }
        const std::vector<std::uint8_t> in(n, 0);
        const auto d = quantize_values(v, in);
        ASSERT_EQ(d.bins, brute_force(v)) << "trial " << trial;
        ASSERT_NEAR(d.total(), 1.0, 1e-9);
    }
}

TEST(Quantize, PermutationInvariant)
{
    Rng rng(13);
    std::vector<double> v(500);
    for (auto& x : v)
        x = rng.uniform(50, 140);
    const std::vector<std::uint8_t> in(v.size(), 0);
    const auto a = quantize_values(v, in);
    std::reverse(v.begin(), v.end());
    EXPECT_EQ(quantize_values(v, in), a);
}

TEST(ConcatTarget, BlocksEqualQuantize)
{
    SceneGenConfig c;
    c.p_building = 0.6;
    const Scene s = generate_scene(c, 2);
    const ReceiverGrid g = receiver_grid(s, 40);
    const std::vector<double> alts{40, 80, 120, 300};
    const auto maps = batch_simulate(s, g, alts, TxConfig{}, NlosModel{});
    const MultiAltitudeTarget t = concat_target(maps);
    ASSERT_EQ(t.k(), 4u);
    EXPECT_EQ(t.altitudes, alts);
    for (std::size_t b = 0; b < 4; ++b)
        EXPECT_EQ(t.blocks[b], quantize(maps[b]));
    const auto flat = t.flatten();
    ASSERT_EQ(flat.size(), 104u);
    double sum = 0.0;
    for (double x : flat)
        sum += x;
    EXPECT_NEAR(sum, 4.0, 4e-9);
    EXPECT_EQ(MultiAltitudeTarget::unflatten(flat, alts), t);

    const std::vector<PathLossMap> one{maps[0]};
    EXPECT_EQ(concat_target(one).blocks[0], quantize(maps[0]));
}

TEST(ConcatTarget, RejectsInconsistentMaps)
{
    auto a = map_from({60, 70, 80, 90}, {0, 0, 0, 0}, 40);
    auto b = map_from({61, 71, 81, 91}, {0, 0, 0, 0}, 80);
    const std::vector<PathLossMap> reversed{b, a};
    EXPECT_THROW(concat_target(reversed), ConsistencyError);
    auto c = b;
    c.indoor[2] = 1;
    const std::vector<PathLossMap> mask{a, c};
    EXPECT_THROW(concat_target(mask), ConsistencyError);
    auto d = map_from({61, 71, 81, 91, 1, 2, 3, 4, 5}, std::vector<std::uint8_t>(9, 0), 80);
    const std::vector<PathLossMap> grid{a, d};
    EXPECT_THROW(concat_target(grid), ConsistencyError);
    EXPECT_THROW(concat_target(std::vector<PathLossMap>{}), ConsistencyError);
}

TEST(Mse, DirectArithmetic)
{
    MultiAltitudeTarget t;
    t.altitudes = {40.0};
    t.blocks.resize(1);
    t.blocks[0].bins[3] = 1.0;
    MultiAltitudeTarget p = t;
    const std::vector<MultiAltitudeTarget> truth{t};
    EXPECT_EQ(mse_per_altitude(truth, std::vector<MultiAltitudeTarget>{p})[0], 0.0);
    p.blocks[0].bins[3] = 0.9;
    EXPECT_NEAR(mse_per_altitude(truth, std::vector<MultiAltitudeTarget>{p})[0], 0.01 / 26.0, 1e-15);
    EXPECT_THROW(mse_per_altitude(truth, std::vector<MultiAltitudeTarget>{}), ConsistencyError);
}

TEST(Mse, VarianceIsMseOfPerBinMean)
{
    Rng rng(14);
    std::vector<MultiAltitudeTarget> ts;
    for (int s = 0; s < 30; ++s) {
        MultiAltitudeTarget t;
        t.altitudes = {40.0, 300.0};
        t.blocks.resize(2);
        for (auto& blk : t.blocks) {
            double sum = 0.0;
            for (auto& x : blk.bins)
                sum += (x = rng.uniform());
            for (auto& x : blk.bins)
                x /= sum;
        }
        ts.push_back(t);
    }
    MultiAltitudeTarget mean = ts[0];
    for (std::size_t b = 0; b < 2; ++b)
        for (int k = 0; k < kBins; ++k) {
            double m = 0.0;
            for (const auto& t : ts)
                m += t.blocks[b].bins[k];
            mean.blocks[b].bins[k] = m / 30.0;
        }
    const auto var = variance_per_altitude(ts);
    const auto mse = mse_per_altitude(ts, std::vector<MultiAltitudeTarget>(30, mean));
    for (std::size_t b = 0; b < 2; ++b)
        EXPECT_NEAR(var[b], mse[b], 1e-15);
}

TEST(TargetsCsv, RoundTripTo9Digits)
{
    SceneGenConfig c;
    const Scene s = generate_scene(c, 5);
    const ReceiverGrid g = receiver_grid(s, 30);
    const std::vector<double> alts{40, 300};
    const std::vector<MultiAltitudeTarget> ts{concat_target(batch_simulate(s, g, alts, TxConfig{}, NlosModel{}))};
    const auto path = std::filesystem::temp_directory_path() / "skyloss_targets.csv";
    save_targets_csv(ts, path);
    const auto back = load_targets_csv(path, alts);
    std::filesystem::remove(path);
    ASSERT_EQ(back.size(), 1u);
    for (std::size_t b = 0; b < 2; ++b)
        for (int k = 0; k < kBins; ++k)
            EXPECT_NEAR(back[0].blocks[b].bins[k], ts[0].blocks[b].bins[k], 1e-9 * std::max(1.0, ts[0].blocks[b].bins[k]));
    const std::string csv = targets_csv(ts);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), ','), 51);
}
