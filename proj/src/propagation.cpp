// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/propagation.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"
#include "skyloss/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace skyloss {

void TxConfig::validate() const
{
    if (!(frequency > 0.0))
        throw ConfigError("tx frequency must be positive");
    if (!(altitude > 0.0))
        throw ConfigError("tx altitude must be positive");
}

Point3 TxConfig::position(double extent) const
{
    return {x.value_or(0.5 * extent), y.value_or(0.5 * extent), altitude};
}

void NlosModel::validate() const
{
    if (eta_los < 0.0 || eta_per_blockage < 0.0 || eta_cap < 0.0)
        throw ConfigError("NLoS excess losses must be non-negative");
    if (eta_cap < eta_per_blockage)
        throw ConfigError("nlos.eta_cap must be at least nlos.eta_per_blockage");
}

double NlosModel::excess_db(std::size_t blockages) const noexcept
{
    if (blockages == 0)
        return std::min(eta_cap, eta_los);
    return std::min(eta_cap, eta_per_blockage * static_cast<double>(blockages));
}

double fspl(double distance_m, double frequency_hz)
{
    if (!(distance_m > 0.0))
        throw DomainError("fspl: distance must be positive");
    if (!(frequency_hz > 0.0))
        throw DomainError("fspl: frequency must be positive");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

double distance(const Point3& a, const Point3& b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

simd::Segment make_segment(const Point3& tx, const Point3& rx)
{
    return {tx.x, tx.y, tx.z, rx.x - tx.x, rx.y - tx.y, rx.z - tx.z};
}

simd::BoxSoA to_boxes(const Scene& scene)
{
    simd::BoxSoA boxes;
    boxes.reserve(scene.buildings.size());
    for (const auto& b : scene.buildings)
        boxes.push_back(b.x_min, b.y_min, b.x_max, b.y_max, b.height);
    return boxes;
}

} // namespace

std::vector<Building> los_blockages(const Point3& tx, const Point3& rx, const Scene& scene)
{
    const simd::BoxSoA boxes = to_boxes(scene);
    std::vector<std::uint8_t> hits(boxes.size());
    simd::active().segment_box_hits(boxes, make_segment(tx, rx), hits.data());
    std::vector<Building> out;
    for (std::size_t i = 0; i < hits.size(); ++i)
        if (hits[i])
            out.push_back(scene.buildings[i]);
    return out;
}

BlockageIndex::BlockageIndex(const Scene& scene) : boxes_(to_boxes(scene)) {}

std::size_t BlockageIndex::count(const Point3& tx, const Point3& rx) const
{
    return simd::active().segment_box_hits(boxes_, make_segment(tx, rx), nullptr);
}

PathLossMap simulate(const Scene& scene, const ReceiverGrid& grid, const TxConfig& tx, const NlosModel& nlos)
{
    tx.validate();
    nlos.validate();
    const Point3 source = tx.position(scene.extent);
    const BlockageIndex index(scene);

    PathLossMap map;
    map.n = grid.n;
    map.altitude = tx.altitude;
    map.indoor = grid.indoor;
    map.values.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());

    // Chunk rows so each task is a reasonable amount of work.
    parallel_for(static_cast<std::size_t>(grid.n), [&](std::size_t row) {
        for (std::size_t k = row * grid.n; k < (row + 1) * grid.n; ++k) {
            if (grid.indoor[k])
                continue;
            const Point3& rx = grid.positions[k];
            map.values[k] = fspl(distance(source, rx), tx.frequency) + nlos.excess_db(index.count(source, rx));
        }
    });
    return map;
}

std::vector<PathLossMap> batch_simulate(const Scene& scene, const ReceiverGrid& grid, std::span<const double> altitudes,
                                        const TxConfig& tx_base, const NlosModel& nlos)
{
    if (altitudes.empty())
        throw ConfigError("batch_simulate needs at least one altitude");
    for (std::size_t i = 1; i < altitudes.size(); ++i)
        if (!(altitudes[i] > altitudes[i - 1]))
            throw ConfigError("altitudes must be strictly increasing");
    std::vector<PathLossMap> maps;
    maps.reserve(altitudes.size());
    for (double h : altitudes) {
        TxConfig tx = tx_base;
        tx.altitude = h;
        maps.push_back(simulate(scene, grid, tx, nlos));
    }
    return maps;
}

std::string path_loss_csv(const PathLossMap& map, const ReceiverGrid& grid)
{
    if (map.values.size() != grid.size())
        throw ConsistencyError("path-loss map and receiver grid differ in size");
    std::ostringstream out;
    out << "i,j,x,y,indoor,pl_db\n";
    for (int i = 0; i < grid.n; ++i) {
        for (int j = 0; j < grid.n; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * grid.n + j;
            const auto& p = grid.positions[k];
            out << i << ',' << j << ',' << io::shortest(p.x) << ',' << io::shortest(p.y) << ','
                << int{map.indoor[k]} << ',';
            if (!map.indoor[k])
                out << io::fixed(map.values[k], 4);
            out << '\n';
        }
    }
    return out.str();
}

void save_path_loss_csv(const PathLossMap& map, const ReceiverGrid& grid, const std::filesystem::path& path)
{
    io::write_text(path, path_loss_csv(map, grid));
}

} // namespace skyloss
