// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/scene.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace skyloss {

using nlohmann::json;

namespace {

bool interiors_overlap(const Building& a, const Building& b)
{
    return a.x_min < b.x_max && b.x_min < a.x_max && a.y_min < b.y_max && b.y_min < a.y_max;
}

constexpr double kMinHeight = 3.0;

} // namespace

void validate_scene(const Scene& scene)
{
    if (!(scene.extent > 0.0))
        throw ConfigError("scene extent must be positive");
    for (std::size_t i = 0; i < scene.buildings.size(); ++i) {
        const Building& b = scene.buildings[i];
        if (!(b.x_min < b.x_max && b.y_min < b.y_max && b.height > 0.0))
            throw ConfigError("building " + std::to_string(i) + " is degenerate");
        if (b.x_min < 0.0 || b.y_min < 0.0 || b.x_max > scene.extent || b.y_max > scene.extent)
            throw ConfigError("building " + std::to_string(i) + " lies outside the region");
        for (std::size_t j = 0; j < i; ++j)
            if (interiors_overlap(b, scene.buildings[j]))
                throw ConfigError("buildings " + std::to_string(j) + " and " + std::to_string(i) + " overlap");
    }
}

void SceneGenConfig::validate() const
{
    if (!(extent > 0.0))
        throw ConfigError("scene.extent must be positive");
    if (!(footprint_min > 0.0 && footprint_min <= footprint_max))
        throw ConfigError("scene footprint range must satisfy 0 < min <= max");
    if (!(cell_size > footprint_max))
        throw ConfigError("scene.cell_size must exceed the largest footprint dimension");
    if (!(p_building >= 0.0 && p_building <= 1.0))
        throw ConfigError("scene.p_building must lie in [0, 1]");
    if (!(gamma > 0.0))
        throw ConfigError("scene.gamma must be positive");
    if (!(h_max >= kMinHeight))
        throw ConfigError("scene.h_max must be at least 3 m");
}

SceneGenConfig scene_preset(std::string_view name)
{
    SceneGenConfig c;
    if (name == "sparse") {
        c.p_building = 0.15;
        c.footprint_min = 15.0;
        c.footprint_max = 40.0;
        c.gamma = 6.0;
        c.h_max = 40.0;
    } else if (name == "suburban") {
        c.p_building = 0.45;
        c.footprint_min = 20.0;
        c.footprint_max = 60.0;
        c.gamma = 10.0;
        c.h_max = 60.0;
    } else if (name == "dense") {
        c.p_building = 0.9;
        c.footprint_min = 50.0;
        c.footprint_max = 90.0;
        c.gamma = 30.0;
        c.h_max = 150.0;
    } else {
        throw ConfigError("unknown scene preset '" + std::string(name) + "'");
    }
    return c;
}

Scene generate_scene(const SceneGenConfig& config, std::uint64_t seed)
{
    config.validate();
    Scene scene;
    scene.extent = config.extent;
    scene.seed = seed;

    Rng rng(seed);
    const int cells = static_cast<int>(std::floor(config.extent / config.cell_size));
    // Row-major over cells; every cell consumes the placement draw, placed
    // buildings consume five more, so the layout is a pure function of seed.
    for (int row = 0; row < cells; ++row) {
        for (int col = 0; col < cells; ++col) {
            if (!(rng.uniform() < config.p_building))
                continue;
            const double w = rng.uniform(config.footprint_min, config.footprint_max);
            const double d = rng.uniform(config.footprint_min, config.footprint_max);
            const double x0 = col * config.cell_size + rng.uniform() * (config.cell_size - w);
            const double y0 = row * config.cell_size + rng.uniform() * (config.cell_size - d);
            const double h = std::clamp(rng.rayleigh(config.gamma), kMinHeight, config.h_max);
            scene.buildings.push_back({x0, y0, std::min(x0 + w, (col + 1) * config.cell_size),
                                       std::min(y0 + d, (row + 1) * config.cell_size), h});
        }
    }
    return scene;
}

SceneStats scene_stats(const Scene& scene)
{
    SceneStats s;
    if (scene.buildings.empty())
        return s;
    double area = 0.0;
    double h2 = 0.0;
    for (const auto& b : scene.buildings) {
        area += b.area();
        h2 += b.height * b.height;
    }
    const double n = static_cast<double>(scene.buildings.size());
    const double km = scene.extent / 1000.0;
    s.alpha = area / (scene.extent * scene.extent);
    s.beta = n / (km * km);
    s.gamma = std::sqrt(h2 / (2.0 * n));
    return s;
}

std::size_t ReceiverGrid::outdoor_count() const noexcept
{
    return static_cast<std::size_t>(std::count(indoor.begin(), indoor.end(), std::uint8_t{0}));
}

ReceiverGrid receiver_grid(const Scene& scene, int n, double rx_height)
{
    if (n < 2)
        throw ConfigError("receiver grid needs n >= 2");
    ReceiverGrid g;
    g.n = n;
    g.extent = scene.extent;
    g.rx_height = rx_height;
    g.positions.resize(static_cast<std::size_t>(n) * n);
    g.indoor.assign(g.positions.size(), 0);
    const double step = scene.extent / n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * n + j;
            g.positions[k] = {(i + 0.5) * step, (j + 0.5) * step, rx_height};
        }
    }
    // Only receivers within a building's index window can be indoors.
    for (const auto& b : scene.buildings) {
        const int i0 = std::max(0, static_cast<int>(std::floor(b.x_min / step - 0.5)));
        const int i1 = std::min(n - 1, static_cast<int>(std::ceil(b.x_max / step - 0.5)));
        const int j0 = std::max(0, static_cast<int>(std::floor(b.y_min / step - 0.5)));
        const int j1 = std::min(n - 1, static_cast<int>(std::ceil(b.y_max / step - 0.5)));
        for (int i = i0; i <= i1; ++i) {
            for (int j = j0; j <= j1; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * n + j;
                if (b.contains_xy(g.positions[k].x, g.positions[k].y))
                    g.indoor[k] = 1;
            }
        }
    }
    return g;
}

RasterImage rasterize(const Scene& scene, int height, int width, double h_max, int channels)
{
    if (height < 1 || width < 1 || channels < 2)
        throw ConfigError("raster needs height, width >= 1 and at least 2 channels");
    for (const auto& b : scene.buildings)
        if (b.height > h_max)
            throw ConfigError("raster h_max is below the tallest building");

    RasterImage img;
    img.channels = channels;
    img.height = height;
    img.width = width;
    img.data.assign(static_cast<std::size_t>(channels) * height * width, 0.0f);

    const double sx = scene.extent / width;
    const double sy = scene.extent / height;
    for (const auto& b : scene.buildings) {
        const float occupancy = 1.0f;
        const float level = static_cast<float>(b.height / h_max);
        const int c0 = std::max(0, static_cast<int>(std::floor(b.x_min / sx - 0.5)));
        const int c1 = std::min(width - 1, static_cast<int>(std::ceil(b.x_max / sx - 0.5)));
        const int r0 = std::max(0, static_cast<int>(std::floor(b.y_min / sy - 0.5)));
        const int r1 = std::min(height - 1, static_cast<int>(std::ceil(b.y_max / sy - 0.5)));
        for (int r = r0; r <= r1; ++r) {
            const double y = (r + 0.5) * sy;
            for (int c = c0; c <= c1; ++c) {
                if (!b.contains_xy((c + 0.5) * sx, y))
                    continue;
                img.at(0, r, c) = occupancy;
                img.at(1, r, c) = level;
            }
        }
    }
    return img;
}

std::string scene_to_json(const Scene& scene)
{
    json buildings = json::array();
    for (const auto& b : scene.buildings)
        buildings.push_back(
            {{"x_min", b.x_min}, {"y_min", b.y_min}, {"x_max", b.x_max}, {"y_max", b.y_max}, {"height", b.height}});
    const json doc = {{"extent", scene.extent}, {"seed", scene.seed}, {"buildings", std::move(buildings)}};
    return doc.dump(1) + "\n";
}

Scene scene_from_json(std::string_view text)
{
    try {
        const json doc = json::parse(text);
        Scene scene;
        scene.extent = doc.at("extent").get<double>();
        scene.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& b : doc.at("buildings"))
            scene.buildings.push_back({b.at("x_min").get<double>(), b.at("y_min").get<double>(),
                                       b.at("x_max").get<double>(), b.at("y_max").get<double>(),
                                       b.at("height").get<double>()});
        validate_scene(scene);
        return scene;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed scene JSON: ") + e.what());
    }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) { io::write_text(path, scene_to_json(scene)); }

Scene load_scene(const std::filesystem::path& path) { return scene_from_json(io::read_text(path)); }

} // namespace skyloss
