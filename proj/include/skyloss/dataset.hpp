// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------
//
// On-disk layout of a generated dataset:
//
//   manifest.json          configuration, per-sample entries and the split
//   scenes/NNNN.json       scene geometry
//   rasters/NNNN.plras     network input image
//   targets.csv            one 26K-wide row per sample, 9 significant digits
//   targets.bin            the same matrix as little-endian doubles

#pragma once

#include "skyloss/histogram.hpp"
#include "skyloss/network.hpp"
#include "skyloss/propagation.hpp"
#include "skyloss/scene.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace skyloss {

struct DatasetConfig {
    int n_regions = 500;
    std::vector<double> altitudes{40.0, 80.0, 120.0, 300.0};
    SceneGenConfig scene;          // p_building and gamma are drawn per region from the ranges below
    double p_building_min = 0.05;
    double p_building_max = 0.95;
    double gamma_min = 5.0;
    double gamma_max = 35.0;
    int grid_n = 110;
    double rx_height = 1.5;
    TxConfig tx;
    NlosModel nlos;
    int raster_channels = 3;
    int raster_height = 224;
    int raster_width = 224;
    std::uint64_t master_seed = 0;
    double train_fraction = 0.8;
    std::uint64_t split_seed = 0;

    void validate() const;
};

struct SampleEntry {
    int id = 0;
    std::string scene_file;
    std::string raster_file;
    int target_row = 0;
    std::uint64_t scene_seed = 0;
    double p_building = 0.0;
    double gamma = 0.0;
    int attempts = 1; // > 1 when earlier layouts had no outdoor receiver
};

struct DatasetManifest {
    int version = 1;
    DatasetConfig config;
    std::vector<SampleEntry> samples;
    std::uint64_t split_seed = 0;
    double train_fraction = 0.0;
    std::vector<int> train_ids;
    std::vector<int> test_ids;

    void validate() const; // unique ids, disjoint and exhaustive split
};

using LogFn = std::function<void(const std::string&)>;

// Region r uses seed split_seed(master_seed, r); attempt a of that region uses
// split_seed(region_seed, a). Output is independent of the thread count.
DatasetManifest build_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir,
                              const LogFn& log = {});

// Seeded shuffle of all ids, then a prefix of round(fraction * n) for training.
void split(DatasetManifest& manifest, double train_fraction, std::uint64_t seed);

// Recomputes rasters and targets of `count` randomly chosen samples from
// their stored scenes; returns the ids that do not match bit for bit.
std::vector<int> verify_dataset(const std::filesystem::path& dir, const DatasetManifest& manifest, int count,
                                std::uint64_t seed);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(std::string_view text);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& dir);
DatasetManifest load_manifest(const std::filesystem::path& dir);

// 16-byte header ("PLRAS1", u8 C, u16 H, u16 W, zero pad) + float32 data.
std::vector<std::uint8_t> encode_raster(const RasterImage& image);
RasterImage decode_raster(std::span<const std::uint8_t> bytes);
void save_raster(const RasterImage& image, const std::filesystem::path& path);
RasterImage load_raster(const std::filesystem::path& path);

// 16-byte header ("PLTGT1", 2 zero bytes, u32 rows, u32 cols) + float64 data.
void save_targets_bin(std::span<const MultiAltitudeTarget> targets, const std::filesystem::path& path);
std::vector<MultiAltitudeTarget> load_targets_bin(const std::filesystem::path& path, std::span<const double> altitudes);

// Targets in manifest row order, from targets.bin.
std::vector<MultiAltitudeTarget> load_targets(const std::filesystem::path& dir, const DatasetManifest& manifest);

// Training samples for the given ids.
std::vector<nn::Sample> load_samples(const std::filesystem::path& dir, const DatasetManifest& manifest,
                                     std::span<const int> ids);

} // namespace skyloss
