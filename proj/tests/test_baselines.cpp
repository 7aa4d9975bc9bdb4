// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/baselines.hpp"
#include "skyloss/errors.hpp"
#include "skyloss/histogram.hpp"
#include "skyloss/propagation.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace skyloss;

TEST(OkumuraHata, UrbanSmallReference)
{
    // 69.55 + 26.16 log 900 - 13.82 log 40 - a(1.5) + (44.9 - 6.55 log 40) log 1
    const double f = 900.0, hb = 40.0, hm = 1.5;
    const double a = (1.1 * std::log10(f) - 0.7) * hm - (1.56 * std::log10(f) - 0.8);
    const double hand = 69.55 + 26.16 * std::log10(f) - 13.82 * std::log10(hb) - a;
    const HataResult r = okumura_hata(f, hb, hm, 1.0, HataEnv::urban_small);
    EXPECT_NEAR(r.loss_db, hand, 1e-9);
    EXPECT_NEAR(r.loss_db, 124.68, 0.05);
    EXPECT_FALSE(r.hb_clamped);
}

TEST(OkumuraHata, DecadeSlope)
{
    const double slope = 44.9 - 6.55 * std::log10(40.0);
    EXPECT_NEAR(slope, 34.41, 0.005);
    const double near = okumura_hata(900, 40, 1.5, 0.5, HataEnv::urban_small).loss_db;
    const double far = okumura_hata(900, 40, 1.5, 5.0, HataEnv::urban_small).loss_db;
    EXPECT_NEAR(far - near, slope, 1e-9);
}

TEST(OkumuraHata, BaseHeightClamp)
{
    const HataResult high = okumura_hata(900, 300, 1.5, 2.0, HataEnv::urban_small);
    EXPECT_TRUE(high.hb_clamped);
    EXPECT_EQ(high.loss_db, okumura_hata(900, 200, 1.5, 2.0, HataEnv::urban_small).loss_db);
    const HataResult low = okumura_hata(900, 10, 1.5, 2.0, HataEnv::urban_small);
    EXPECT_TRUE(low.hb_clamped);
    EXPECT_EQ(low.loss_db, okumura_hata(900, 30, 1.5, 2.0, HataEnv::urban_small).loss_db);
}

TEST(OkumuraHata, EnvironmentCorrections)
{
    const double f = 900.0, lf = std::log10(f);
    const double urban = okumura_hata(f, 50, 1.5, 3.0, HataEnv::urban_small).loss_db;
    EXPECT_NEAR(okumura_hata(f, 50, 1.5, 3.0, HataEnv::suburban).loss_db,
                urban - 2.0 * std::pow(std::log10(f / 28.0), 2) - 5.4, 1e-9);
    EXPECT_NEAR(okumura_hata(f, 50, 1.5, 3.0, HataEnv::open).loss_db, urban - 4.78 * lf * lf + 18.33 * lf - 40.94,
                1e-9);
    // Large-city a(hm) above 300 MHz.
    const double a_small = (1.1 * lf - 0.7) * 1.5 - (1.56 * lf - 0.8);
    const double a_large = 3.2 * std::pow(std::log10(11.75 * 1.5), 2) - 4.97;
    EXPECT_NEAR(okumura_hata(f, 50, 1.5, 3.0, HataEnv::urban_large).loss_db, urban + a_small - a_large, 1e-9);
    // Below 300 MHz the other large-city formula applies.
    const double f2 = 200.0, lf2 = std::log10(f2);
    const double a_small2 = (1.1 * lf2 - 0.7) * 1.5 - (1.56 * lf2 - 0.8);
    const double a_large2 = 8.29 * std::pow(std::log10(1.54 * 1.5), 2) - 1.1;
    EXPECT_NEAR(okumura_hata(f2, 50, 1.5, 3.0, HataEnv::urban_large).loss_db,
                okumura_hata(f2, 50, 1.5, 3.0, HataEnv::urban_small).loss_db + a_small2 - a_large2, 1e-9);
}

TEST(OkumuraHata, MonotoneInDistanceAndHeight)
{
    double prev = -1e9;
    for (double d = 0.01; d < 20.0; d *= 1.3) {
        const double l = okumura_hata(900, 60, 1.5, d, HataEnv::urban_small).loss_db;
        EXPECT_GT(l, prev);
        prev = l;
    }
    prev = 1e9;
    for (double hb = 30; hb <= 200; hb += 10) {
        const double l = okumura_hata(900, hb, 1.5, 2.0, HataEnv::urban_small).loss_db;
        EXPECT_LT(l, prev);
        prev = l;
    }
}

TEST(OkumuraHata, DomainErrors)
{
    EXPECT_THROW(okumura_hata(100, 40, 1.5, 1, HataEnv::urban_small), DomainError);
    EXPECT_THROW(okumura_hata(2000, 40, 1.5, 1, HataEnv::urban_small), DomainError);
    EXPECT_THROW(okumura_hata(900, 40, 0.5, 1, HataEnv::urban_small), DomainError);
    EXPECT_THROW(okumura_hata(900, 40, 1.5, 0, HataEnv::urban_small), DomainError);
}

TEST(HataEnv, ParseAndName)
{
    for (HataEnv e : {HataEnv::urban_small, HataEnv::urban_large, HataEnv::suburban, HataEnv::open})
        EXPECT_EQ(parse_hata_env(hata_env_name(e)), e);
    EXPECT_EQ(hata_env_name(HataEnv::urban_small), "urban-small");
    EXPECT_THROW(parse_hata_env("rural"), ConfigError);
}

TEST(BaselineDistribution, FreeSpaceEqualsEmptySceneSimulation)
{
    const Scene s;
    const ReceiverGrid g = receiver_grid(s, 110);
    for (double h : {40.0, 300.0}) {
        TxConfig tx;
        tx.altitude = h;
        EXPECT_EQ(baseline_distribution(g, tx, {BaselineKind::free_space, HataEnv::urban_small}),
                  quantize(simulate(s, g, tx, NlosModel{})));
    }
}

TEST(BaselineDistribution, HataIgnoresLayoutExceptIndoorMask)
{
    SceneGenConfig c;
    c.p_building = 0.5;
    const Scene a = generate_scene(c, 1);
    const ReceiverGrid ga = receiver_grid(a, 60);
    ReceiverGrid gb = ga;
    std::fill(gb.indoor.begin(), gb.indoor.end(), 0);
    TxConfig tx;
    tx.altitude = 120.0;
    const BaselineModel hata{BaselineKind::okumura_hata, HataEnv::urban_small};
    // Recompute by hand over the outdoor receivers of ga.
    std::vector<double> v;
    std::vector<std::uint8_t> in;
    const Point3 t = tx.position(ga.extent);
    for (std::size_t k = 0; k < ga.size(); ++k) {
        const double dx = ga.positions[k].x - t.x, dy = ga.positions[k].y - t.y;
        v.push_back(okumura_hata(900, 120, 1.5, std::max(1e-3, std::hypot(dx, dy) / 1e3), HataEnv::urban_small).loss_db);
        in.push_back(ga.indoor[k]);
    }
    EXPECT_EQ(baseline_distribution(ga, tx, hata), quantize_values(v, in));
    EXPECT_NE(baseline_distribution(gb, tx, hata), baseline_distribution(ga, tx, hata));
}

TEST(BaselineDistribution, HigherAltitudeShiftsFreeSpaceUp)
{
    const ReceiverGrid g = receiver_grid(Scene{}, 110);
    TxConfig lo, hi;
    lo.altitude = 40.0;
    hi.altitude = 300.0;
    const auto a = baseline_distribution(g, lo, {});
    const auto b = baseline_distribution(g, hi, {});
    // Every receiver's loss grows, so the CDF at 300 m never exceeds the one at 40 m.
    double ca = 0.0, cb = 0.0;
    for (int k = 0; k < kBins; ++k) {
        ca += a.bins[k];
        cb += b.bins[k];
        EXPECT_LE(cb, ca + 1e-12) << "bin " << k;
    }
    EXPECT_EQ(a.bins[bin_index(fspl(38.5, 900e6))] > 0.0, true);
}

TEST(PLos, LimitsAndMonotonicity)
{
    EXPECT_GT(p_los(90.0, 4.88, 0.43), 0.999);
    EXPECT_NEAR(p_los(45.0, 4.88, 1e-12), 1.0 / (1.0 + 4.88), 1e-9);
    double prev = 0.0;
    for (double e = 1.0; e <= 90.0; e += 1.0) {
        const double p = p_los(e, 9.61, 0.16);
        EXPECT_GE(p, prev);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
    EXPECT_THROW(p_los(0.0, 4.88, 0.43), DomainError);
    EXPECT_THROW(p_los(91.0, 4.88, 0.43), DomainError);
    EXPECT_THROW(p_los(30.0, -1.0, 0.43), DomainError);
}
