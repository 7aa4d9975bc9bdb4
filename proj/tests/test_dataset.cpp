// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/dataset.hpp"
#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/parallel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <mutex>

using namespace skyloss;
namespace fs = std::filesystem;

namespace {

DatasetConfig small_config(int regions = 6)
{
    DatasetConfig c;
    c.n_regions = regions;
    c.grid_n = 24;
    c.raster_height = 16;
    c.raster_width = 16;
    c.master_seed = 11;
    c.train_fraction = 0.5;
    return c;
}

class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("skyloss_" + name))
    {
        fs::remove_all(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

DatasetManifest fake_manifest(int n)
{
    DatasetManifest m;
    for (int i = 0; i < n; ++i)
        m.samples.push_back({i, "", "", i, 0, 0.0, 0.0, 1});
    return m;
}

} // namespace

TEST(Split, FourFifthsOfFiveHundred)
{
    DatasetManifest m = fake_manifest(500);
    split(m, 0.8, 3);
    EXPECT_EQ(m.train_ids.size(), 400u);
    EXPECT_EQ(m.test_ids.size(), 100u);
    EXPECT_NO_THROW(m.validate());
}

TEST(Split, TwoRegionsHalf)
{
    DatasetManifest m = fake_manifest(2);
    split(m, 0.5, 1);
    EXPECT_EQ(m.train_ids.size(), 1u);
    EXPECT_EQ(m.test_ids.size(), 1u);
}

TEST(Split, SeededAndExhaustive)
{
    DatasetManifest a = fake_manifest(50), b = fake_manifest(50), c = fake_manifest(50);
    split(a, 0.7, 9);
    split(b, 0.7, 9);
    split(c, 0.7, 10);
    EXPECT_EQ(a.train_ids, b.train_ids);
    EXPECT_NE(a.train_ids, c.train_ids);
    std::vector<int> all = a.train_ids;
    all.insert(all.end(), a.test_ids.begin(), a.test_ids.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 50; ++i)
        EXPECT_EQ(all[static_cast<std::size_t>(i)], i);
}

TEST(Split, EmptySideRejected)
{
    DatasetManifest m = fake_manifest(3);
    EXPECT_THROW(split(m, 0.1, 0), ConfigError);
    EXPECT_THROW(split(m, 0.9, 0), ConfigError);
    EXPECT_THROW(split(m, 1.0, 0), ConfigError);
}

TEST(Manifest, ValidateCatchesBadSplits)
{
    DatasetManifest m = fake_manifest(4);
    m.train_ids = {0, 1};
    m.test_ids = {1, 2, 3};
    EXPECT_THROW(m.validate(), ConsistencyError);
    m.test_ids = {2};
    EXPECT_THROW(m.validate(), ConsistencyError);
    m.test_ids = {2, 3};
    EXPECT_NO_THROW(m.validate());
    m.samples.push_back(m.samples[0]);
    EXPECT_THROW(m.validate(), ConsistencyError);
}

TEST(BuildDataset, FilesTargetsAndRoundTrip)
{
    TempDir dir("dataset_build");
    const DatasetConfig c = small_config();
    const DatasetManifest m = build_dataset(c, dir.path());
    ASSERT_EQ(m.samples.size(), 6u);
    for (const auto& s : m.samples) {
        EXPECT_TRUE(fs::exists(dir.path() / s.scene_file));
        EXPECT_TRUE(fs::exists(dir.path() / s.raster_file));
        EXPECT_GE(s.p_building, c.p_building_min);
        EXPECT_LE(s.p_building, c.p_building_max);
    }
    EXPECT_EQ(m.samples[3].scene_file, "scenes/0003.json");
    EXPECT_TRUE(fs::exists(dir.path() / "targets.csv"));
    EXPECT_TRUE(fs::exists(dir.path() / "manifest.json"));

    const DatasetManifest loaded = load_manifest(dir.path());
    EXPECT_EQ(manifest_to_json(loaded), manifest_to_json(m));
    EXPECT_EQ(loaded.train_ids.size(), 3u);

    const auto targets = load_targets(dir.path(), loaded);
    ASSERT_EQ(targets.size(), 6u);
    const auto csv = load_targets_csv(dir.path() / "targets.csv", c.altitudes);
    for (std::size_t r = 0; r < 6; ++r) {
        double total = 0.0;
        for (double v : targets[r].flatten())
            total += v;
        EXPECT_NEAR(total, 4.0, 4e-9);
        for (std::size_t b = 0; b < 4; ++b)
            for (int k = 0; k < kBins; ++k)
                EXPECT_NEAR(csv[r].blocks[b].bins[k], targets[r].blocks[b].bins[k], 1e-9);
    }

    // Every stored target equals a recomputation from its stored scene.
    EXPECT_TRUE(verify_dataset(dir.path(), loaded, 6, 0).empty());

    const auto samples = load_samples(dir.path(), loaded, loaded.test_ids);
    ASSERT_EQ(samples.size(), 3u);
    EXPECT_EQ(samples[0].input.size(), 3u * 16 * 16);
    EXPECT_EQ(samples[1].target, targets[static_cast<std::size_t>(loaded.test_ids[1])].flatten());
}

TEST(BuildDataset, IndependentOfThreadCount)
{
    TempDir a("dataset_t1"), b("dataset_t4");
    const DatasetConfig c = small_config(5);
    set_thread_count(1);
    build_dataset(c, a.path());
    set_thread_count(4);
    build_dataset(c, b.path());
    set_thread_count(0);
    for (const char* f : {"manifest.json", "targets.csv", "targets.bin", "scenes/0004.json", "rasters/0002.plras"})
        EXPECT_EQ(io::read_bytes(a.path() / f), io::read_bytes(b.path() / f)) << f;
}

TEST(BuildDataset, VerifyDetectsTampering)
{
    TempDir dir("dataset_tamper");
    const DatasetManifest m = build_dataset(small_config(3), dir.path());
    Scene s = load_scene(dir.path() / m.samples[1].scene_file);
    ASSERT_FALSE(s.buildings.empty());
    s.buildings.clear();
    save_scene(s, dir.path() / m.samples[1].scene_file);
    EXPECT_EQ(verify_dataset(dir.path(), m, 3, 0), std::vector<int>{1});
}

TEST(BuildDataset, AllIndoorRegionsAreRegenerated)
{
    TempDir dir("dataset_regen");
    DatasetConfig c = small_config(8);
    c.scene.extent = 200.0;
    c.scene.footprint_min = 99.0;
    c.scene.footprint_max = 99.5; // every placed building covers its cell center
    c.p_building_min = 0.9;
    c.p_building_max = 1.0;
    c.grid_n = 2; // one receiver per cell center
    std::mutex mu;
    std::vector<std::string> lines;
    const DatasetManifest m = build_dataset(c, dir.path(), [&](const std::string& s) {
        std::lock_guard lock(mu);
        lines.push_back(s);
    });
    int retried = 0;
    for (const auto& s : m.samples) {
        retried += s.attempts > 1;
        const Scene scene = load_scene(dir.path() / s.scene_file);
        EXPECT_GT(receiver_grid(scene, 2).outdoor_count(), 0u);
    }
    EXPECT_GT(retried, 0);
    EXPECT_TRUE(std::any_of(lines.begin(), lines.end(),
                            [](const std::string& l) { return l.find("regenerating") != std::string::npos; }));

    c.p_building_min = 1.0;
    TempDir never("dataset_never");
    EXPECT_THROW(build_dataset(c, never.path()), DegenerateInputError);
}

TEST(BuildDataset, RejectsInvalidConfig)
{
    TempDir dir("dataset_bad");
    DatasetConfig c = small_config();
    c.altitudes = {80, 40};
    EXPECT_THROW(build_dataset(c, dir.path()), ConfigError);
    c = small_config();
    c.n_regions = 1;
    EXPECT_THROW(build_dataset(c, dir.path()), ConfigError);
}

TEST(RasterFile, HeaderAndRoundTrip)
{
    Scene s;
    s.buildings.push_back({0, 0, 900, 900, 60});
    const RasterImage img = rasterize(s, 20, 30, 120.0);
    const auto bytes = encode_raster(img);
    ASSERT_EQ(bytes.size(), 16u + 4u * 3 * 20 * 30);
    EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 6), "PLRAS1");
    EXPECT_EQ(bytes[6], 3);
    EXPECT_EQ(io::get_u16(bytes.data() + 7), 20);
    EXPECT_EQ(io::get_u16(bytes.data() + 9), 30);
    EXPECT_EQ(decode_raster(bytes), img);
    auto broken = bytes;
    broken.resize(100);
    EXPECT_THROW(decode_raster(broken), IoError);
    broken = bytes;
    broken[0] = 'X';
    EXPECT_THROW(decode_raster(broken), IoError);
}
