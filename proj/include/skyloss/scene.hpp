// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skyloss {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// Extruded axis-aligned box standing on flat ground at z = 0.
struct Building {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;
    double height = 0.0;

    double area() const noexcept { return (x_max - x_min) * (y_max - y_min); }
    // Closed footprint test.
    bool contains_xy(double x, double y) const noexcept
    {
        return x_min <= x && x <= x_max && y_min <= y && y <= y_max;
    }

    friend bool operator==(const Building&, const Building&) = default;
};

struct Scene {
    double extent = 1800.0; // side of the square region [0, extent]^2, meters
    std::vector<Building> buildings;
    std::uint64_t seed = 0;

    friend bool operator==(const Scene&, const Scene&) = default;
};

// Throws ConfigError when a building is degenerate, outside the region, or
// overlaps another building's interior.
void validate_scene(const Scene& scene);

// Parameters of the cell-based layout generator. The region is tiled with
// square cells of `cell_size`; each cell receives at most one building with
// probability `p_building`, jittered inside its cell.
struct SceneGenConfig {
    double extent = 1800.0;
    double cell_size = 100.0;
    double p_building = 0.5;
    double footprint_min = 20.0;
    double footprint_max = 80.0;
    double gamma = 15.0; // Rayleigh scale of heights, meters
    double h_max = 120.0;

    void validate() const;
};

// Named presets: "sparse", "suburban", "dense". Throws ConfigError otherwise.
SceneGenConfig scene_preset(std::string_view name);

Scene generate_scene(const SceneGenConfig& config, std::uint64_t seed);

// Built-up ratio, density and height scale of a layout.
struct SceneStats {
    double alpha = 0.0;          // built-up area / total area
    double beta = 0.0;           // buildings per km^2
    std::optional<double> gamma; // Rayleigh MLE sqrt(sum h^2 / 2n); empty without buildings
};

SceneStats scene_stats(const Scene& scene);

struct ReceiverGrid {
    int n = 0;
    double extent = 0.0;
    double rx_height = 1.5;
    std::vector<Point3> positions;   // row-major, index i * n + j
    std::vector<std::uint8_t> indoor; // 1 if inside a building footprint

    std::size_t size() const noexcept { return positions.size(); }
    std::size_t outdoor_count() const noexcept;
};

// Receivers at ((i+0.5) extent/n, (j+0.5) extent/n, rx_height).
ReceiverGrid receiver_grid(const Scene& scene, int n, double rx_height = 1.5);

struct RasterImage {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data; // channel-major, then row-major

    float at(int c, int row, int col) const
    {
        return data[(static_cast<std::size_t>(c) * height + row) * width + col];
    }
    float& at(int c, int row, int col) { return data[(static_cast<std::size_t>(c) * height + row) * width + col]; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

// Top-down surrogate image. Pixel (row, col) samples the scene at
// ((col+0.5) extent/W, (row+0.5) extent/H). Channel 0 is footprint occupancy,
// channel 1 is height / h_max, channel 2 is reserved and zero; channels
// beyond 3 are also zero.
RasterImage rasterize(const Scene& scene, int height, int width, double h_max, int channels = 3);

// JSON {extent, seed, buildings:[{x_min,y_min,x_max,y_max,height}]}.
std::string scene_to_json(const Scene& scene);
Scene scene_from_json(std::string_view text);
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

} // namespace skyloss
