// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/dataset.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/parallel.hpp"
#include "skyloss/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numeric>
#include <set>

namespace skyloss {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kMaxAttempts = 32;
constexpr char kRasterMagic[6] = {'P', 'L', 'R', 'A', 'S', '1'};
constexpr char kTargetMagic[6] = {'P', 'L', 'T', 'G', 'T', '1'};

std::string numbered(const char* dir, int id, const char* ext)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s/%04d.%s", dir, id, ext);
    return buf;
}

void check_altitudes(const std::vector<double>& altitudes)
{
    if (altitudes.empty())
        throw ConfigError("altitudes: at least one altitude is required");
    for (std::size_t i = 0; i < altitudes.size(); ++i) {
        if (!(altitudes[i] > 0.0))
            throw ConfigError("altitudes: values must be positive");
        if (i > 0 && !(altitudes[i] > altitudes[i - 1]))
            throw ConfigError("altitudes: values must be strictly increasing");
    }
}

struct Region {
    Scene scene;
    RasterImage raster;
    MultiAltitudeTarget target;
    SampleEntry entry;
};

Region build_region(const DatasetConfig& c, int id, const LogFn& log)
{
    const std::uint64_t region_seed = split_seed(c.master_seed, static_cast<std::uint64_t>(id));
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::uint64_t seed = split_seed(region_seed, static_cast<std::uint64_t>(attempt));
        Rng draw(seed);
        SceneGenConfig sc = c.scene;
        sc.p_building = draw.uniform(c.p_building_min, c.p_building_max);
        sc.gamma = draw.uniform(c.gamma_min, c.gamma_max);
        const std::uint64_t scene_seed = mix64(seed);

        Region r;
        r.scene = generate_scene(sc, scene_seed);
        const ReceiverGrid grid = receiver_grid(r.scene, c.grid_n, c.rx_height);
        if (grid.outdoor_count() == 0) {
            if (log)
                log("region " + std::to_string(id) + ": no outdoor receivers, regenerating (attempt " +
                    std::to_string(attempt + 2) + ")");
            continue;
        }
        r.raster = rasterize(r.scene, c.raster_height, c.raster_width, c.scene.h_max, c.raster_channels);
        const auto maps = batch_simulate(r.scene, grid, c.altitudes, c.tx, c.nlos);
        r.target = concat_target(maps);
        r.entry = {id, numbered("scenes", id, "json"), numbered("rasters", id, "plras"), id, scene_seed,
                   sc.p_building, sc.gamma, attempt + 1};
        return r;
    }
    throw DegenerateInputError("region " + std::to_string(id) + ": no layout with outdoor receivers after " +
                               std::to_string(kMaxAttempts) + " attempts");
}

json config_to_json(const DatasetConfig& c)
{
    json tx = {{"frequency_hz", c.tx.frequency},
               {"tx_power_dbm", c.tx.tx_power_dbm},
               {"rx_sensitivity_dbm", c.tx.rx_sensitivity_dbm}};
    if (c.tx.x)
        tx["x"] = *c.tx.x;
    if (c.tx.y)
        tx["y"] = *c.tx.y;
    return {{"n_regions", c.n_regions},
            {"altitudes", c.altitudes},
            {"scene",
             {{"extent", c.scene.extent},
              {"cell_size", c.scene.cell_size},
              {"footprint_min", c.scene.footprint_min},
              {"footprint_max", c.scene.footprint_max},
              {"h_max", c.scene.h_max},
              {"p_building_min", c.p_building_min},
              {"p_building_max", c.p_building_max},
              {"gamma_min", c.gamma_min},
              {"gamma_max", c.gamma_max}}},
            {"grid", {{"n", c.grid_n}, {"rx_height", c.rx_height}}},
            {"tx", tx},
            {"nlos", {{"eta_los", c.nlos.eta_los}, {"eta_per_blockage", c.nlos.eta_per_blockage}, {"eta_cap", c.nlos.eta_cap}}},
            {"raster", {{"channels", c.raster_channels}, {"height", c.raster_height}, {"width", c.raster_width}}},
            {"master_seed", c.master_seed}};
}

DatasetConfig config_from_json(const json& j)
{
    DatasetConfig c;
    c.n_regions = j.at("n_regions").get<int>();
    c.altitudes = j.at("altitudes").get<std::vector<double>>();
    const json& s = j.at("scene");
    c.scene.extent = s.at("extent").get<double>();
    c.scene.cell_size = s.at("cell_size").get<double>();
    c.scene.footprint_min = s.at("footprint_min").get<double>();
    c.scene.footprint_max = s.at("footprint_max").get<double>();
    c.scene.h_max = s.at("h_max").get<double>();
    c.p_building_min = s.at("p_building_min").get<double>();
    c.p_building_max = s.at("p_building_max").get<double>();
    c.gamma_min = s.at("gamma_min").get<double>();
    c.gamma_max = s.at("gamma_max").get<double>();
    c.grid_n = j.at("grid").at("n").get<int>();
    c.rx_height = j.at("grid").at("rx_height").get<double>();
    const json& tx = j.at("tx");
    c.tx.frequency = tx.at("frequency_hz").get<double>();
    c.tx.tx_power_dbm = tx.at("tx_power_dbm").get<double>();
    c.tx.rx_sensitivity_dbm = tx.at("rx_sensitivity_dbm").get<double>();
    if (tx.contains("x"))
        c.tx.x = tx.at("x").get<double>();
    if (tx.contains("y"))
        c.tx.y = tx.at("y").get<double>();
    const json& nl = j.at("nlos");
    c.nlos = {nl.at("eta_los").get<double>(), nl.at("eta_per_blockage").get<double>(), nl.at("eta_cap").get<double>()};
    const json& r = j.at("raster");
    c.raster_channels = r.at("channels").get<int>();
    c.raster_height = r.at("height").get<int>();
    c.raster_width = r.at("width").get<int>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    return c;
}

} // namespace

void DatasetConfig::validate() const
{
    if (n_regions < 2)
        throw ConfigError("dataset needs at least 2 regions");
    check_altitudes(altitudes);
    SceneGenConfig probe = scene;
    probe.p_building = p_building_min;
    probe.gamma = gamma_min;
    probe.validate();
    if (!(0.0 <= p_building_min && p_building_min <= p_building_max && p_building_max <= 1.0))
        throw ConfigError("scene.p_building range must satisfy 0 <= min <= max <= 1");
    if (!(0.0 < gamma_min && gamma_min <= gamma_max))
        throw ConfigError("scene.gamma range must satisfy 0 < min <= max");
    if (grid_n < 2)
        throw ConfigError("grid.n must be at least 2");
    if (raster_channels < 2 || raster_height < 1 || raster_width < 1 || raster_height > 65535 ||
        raster_width > 65535 || raster_channels > 255)
        throw ConfigError("raster dimensions out of range");
    tx.validate();
    nlos.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("dataset.train_fraction must lie in (0, 1)");
}

void DatasetManifest::validate() const
{
    std::set<int> ids;
    for (const auto& s : samples)
        if (!ids.insert(s.id).second)
            throw ConsistencyError("manifest: duplicate sample id " + std::to_string(s.id));
    std::set<int> seen;
    for (int id : train_ids)
        if (!ids.count(id) || !seen.insert(id).second)
            throw ConsistencyError("manifest: invalid train id " + std::to_string(id));
    for (int id : test_ids)
        if (!ids.count(id) || !seen.insert(id).second)
            throw ConsistencyError("manifest: invalid or overlapping test id " + std::to_string(id));
    if (!train_ids.empty() && seen.size() != ids.size())
        throw ConsistencyError("manifest: split does not cover every sample");
}

void split(DatasetManifest& manifest, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train fraction must lie in (0, 1)");
    std::vector<int> ids;
    for (const auto& s : manifest.samples)
        ids.push_back(s.id);
    std::sort(ids.begin(), ids.end());
    Rng rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ids.size())));
    if (n_train == 0 || n_train >= ids.size())
        throw ConfigError("train fraction " + io::shortest(train_fraction) + " leaves one side of the split empty");
    manifest.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    manifest.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    manifest.split_seed = seed;
    manifest.train_fraction = train_fraction;
}

DatasetManifest build_dataset(const DatasetConfig& config, const fs::path& out_dir, const LogFn& log)
{
    config.validate();
    fs::create_directories(out_dir / "scenes");
    fs::create_directories(out_dir / "rasters");

    std::vector<Region> regions(static_cast<std::size_t>(config.n_regions));
    parallel_for(regions.size(), [&](std::size_t i) {
        regions[i] = build_region(config, static_cast<int>(i), log);
        save_scene(regions[i].scene, out_dir / regions[i].entry.scene_file);
        save_raster(regions[i].raster, out_dir / regions[i].entry.raster_file);
        if (log && (i + 1) % 10 == 0)
            log("built region " + std::to_string(i + 1) + "/" + std::to_string(regions.size()));
    });

    DatasetManifest m;
    m.config = config;
    std::vector<MultiAltitudeTarget> targets;
    for (auto& r : regions) {
        m.samples.push_back(r.entry);
        targets.push_back(std::move(r.target));
    }
    split(m, config.train_fraction, config.split_seed);
    save_targets_csv(targets, out_dir / "targets.csv");
    save_targets_bin(targets, out_dir / "targets.bin");
    save_manifest(m, out_dir);
    return m;
}

std::vector<int> verify_dataset(const fs::path& dir, const DatasetManifest& manifest, int count, std::uint64_t seed)
{
    const auto targets = load_targets(dir, manifest);
    std::vector<std::size_t> pick(manifest.samples.size());
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = pick.size(); i > 1; --i)
        std::swap(pick[i - 1], pick[rng.below(i)]);
    pick.resize(std::min(pick.size(), static_cast<std::size_t>(std::max(count, 0))));
    std::sort(pick.begin(), pick.end());

    const DatasetConfig& c = manifest.config;
    std::vector<int> bad;
    for (std::size_t idx : pick) {
        const SampleEntry& e = manifest.samples[idx];
        const Scene scene = load_scene(dir / e.scene_file);
        const ReceiverGrid grid = receiver_grid(scene, c.grid_n, c.rx_height);
        const auto maps = batch_simulate(scene, grid, c.altitudes, c.tx, c.nlos);
        const bool target_ok = concat_target(maps) == targets[static_cast<std::size_t>(e.target_row)];
        const bool raster_ok = rasterize(scene, c.raster_height, c.raster_width, c.scene.h_max, c.raster_channels) ==
                               load_raster(dir / e.raster_file);
        if (!target_ok || !raster_ok)
            bad.push_back(e.id);
    }
    return bad;
}

std::string manifest_to_json(const DatasetManifest& m)
{
    json samples = json::array();
    for (const auto& s : m.samples)
        samples.push_back({{"id", s.id},
                           {"scene", s.scene_file},
                           {"raster", s.raster_file},
                           {"target_row", s.target_row},
                           {"scene_seed", s.scene_seed},
                           {"p_building", s.p_building},
                           {"gamma", s.gamma},
                           {"attempts", s.attempts}});
    const json doc = {{"version", m.version},
                      {"master_seed", m.config.master_seed},
                      {"altitudes", m.config.altitudes},
                      {"raster",
                       {{"channels", m.config.raster_channels},
                        {"height", m.config.raster_height},
                        {"width", m.config.raster_width}}},
                      {"region_count", m.samples.size()},
                      {"config", config_to_json(m.config)},
                      {"samples", samples},
                      {"split",
                       {{"seed", m.split_seed},
                        {"train_fraction", m.train_fraction},
                        {"train", m.train_ids},
                        {"test", m.test_ids}}}};
    return doc.dump(1) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text)
{
    try {
        const json doc = json::parse(text);
        DatasetManifest m;
        m.version = doc.at("version").get<int>();
        if (m.version != 1)
            throw IoError("unsupported manifest version " + std::to_string(m.version));
        m.config = config_from_json(doc.at("config"));
        for (const auto& s : doc.at("samples"))
            m.samples.push_back({s.at("id").get<int>(), s.at("scene").get<std::string>(),
                                 s.at("raster").get<std::string>(), s.at("target_row").get<int>(),
                                 s.at("scene_seed").get<std::uint64_t>(), s.at("p_building").get<double>(),
                                 s.at("gamma").get<double>(), s.at("attempts").get<int>()});
        const json& sp = doc.at("split");
        m.split_seed = sp.at("seed").get<std::uint64_t>();
        m.train_fraction = sp.at("train_fraction").get<double>();
        m.config.split_seed = m.split_seed;
        m.config.train_fraction = m.train_fraction;
        m.train_ids = sp.at("train").get<std::vector<int>>();
        m.test_ids = sp.at("test").get<std::vector<int>>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed manifest: ") + e.what());
    }
}

void save_manifest(const DatasetManifest& manifest, const fs::path& dir)
{
    io::write_text(dir / "manifest.json", manifest_to_json(manifest));
}

DatasetManifest load_manifest(const fs::path& dir) { return manifest_from_json(io::read_text(dir / "manifest.json")); }

std::vector<std::uint8_t> encode_raster(const RasterImage& image)
{
    std::vector<std::uint8_t> out(kRasterMagic, kRasterMagic + 6);
    out.push_back(static_cast<std::uint8_t>(image.channels));
    io::put_u16(out, static_cast<std::uint16_t>(image.height));
    io::put_u16(out, static_cast<std::uint16_t>(image.width));
    out.resize(16, 0);
    out.reserve(16 + 4 * image.data.size());
    for (float v : image.data)
        io::put_f32(out, v);
    return out;
}

RasterImage decode_raster(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kRasterMagic, 6) != 0)
        throw IoError("not a PLRAS1 raster");
    RasterImage img;
    img.channels = bytes[6];
    img.height = io::get_u16(bytes.data() + 7);
    img.width = io::get_u16(bytes.data() + 9);
    const std::size_t n = static_cast<std::size_t>(img.channels) * img.height * img.width;
    if (bytes.size() != 16 + 4 * n)
        throw IoError("raster payload size does not match its header");
    img.data.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        img.data[i] = io::get_f32(bytes.data() + 16 + 4 * i);
    return img;
}

void save_raster(const RasterImage& image, const fs::path& path) { io::write_bytes(path, encode_raster(image)); }

RasterImage load_raster(const fs::path& path) { return decode_raster(io::read_bytes(path)); }

void save_targets_bin(std::span<const MultiAltitudeTarget> targets, const fs::path& path)
{
    const std::size_t cols = targets.empty() ? 0 : targets[0].k() * kBins;
    std::vector<std::uint8_t> out(kTargetMagic, kTargetMagic + 6);
    out.resize(8, 0);
    for (std::uint32_t v : {static_cast<std::uint32_t>(targets.size()), static_cast<std::uint32_t>(cols)})
        for (int b = 0; b < 4; ++b)
            out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    for (const auto& t : targets)
        for (double v : t.flatten())
            io::put_f64(out, v);
    io::write_bytes(path, out);
}

std::vector<MultiAltitudeTarget> load_targets_bin(const fs::path& path, std::span<const double> altitudes)
{
    const auto bytes = io::read_bytes(path);
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kTargetMagic, 6) != 0)
        throw IoError("not a PLTGT1 target file: " + path.string());
    auto u32 = [&](std::size_t off) {
        return static_cast<std::uint32_t>(bytes[off]) | static_cast<std::uint32_t>(bytes[off + 1]) << 8 |
               static_cast<std::uint32_t>(bytes[off + 2]) << 16 | static_cast<std::uint32_t>(bytes[off + 3]) << 24;
    };
    const std::size_t rows = u32(8), cols = u32(12);
    if (cols != altitudes.size() * kBins || bytes.size() != 16 + 8 * rows * cols)
        throw IoError("target file shape does not match the altitude set: " + path.string());
    std::vector<MultiAltitudeTarget> out;
    std::vector<double> row(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c)
            row[c] = io::get_f64(bytes.data() + 16 + 8 * (r * cols + c));
        out.push_back(MultiAltitudeTarget::unflatten(row, altitudes));
    }
    return out;
}

std::vector<MultiAltitudeTarget> load_targets(const fs::path& dir, const DatasetManifest& manifest)
{
    auto targets = load_targets_bin(dir / "targets.bin", manifest.config.altitudes);
    for (const auto& s : manifest.samples)
        if (s.target_row < 0 || static_cast<std::size_t>(s.target_row) >= targets.size())
            throw IoError("manifest refers to missing target row " + std::to_string(s.target_row));
    return targets;
}

std::vector<nn::Sample> load_samples(const fs::path& dir, const DatasetManifest& manifest, std::span<const int> ids)
{
    const auto targets = load_targets(dir, manifest);
    std::vector<nn::Sample> out;
    for (int id : ids) {
        const auto it = std::find_if(manifest.samples.begin(), manifest.samples.end(),
                                     [&](const SampleEntry& e) { return e.id == id; });
        if (it == manifest.samples.end())
            throw ConsistencyError("unknown sample id " + std::to_string(id));
        const RasterImage img = load_raster(dir / it->raster_file);
        nn::Sample s;
        s.input.assign(img.data.begin(), img.data.end());
        s.target = targets[static_cast<std::size_t>(it->target_row)].flatten();
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace skyloss
