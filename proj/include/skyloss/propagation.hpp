// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/scene.hpp"
#include "skyloss/simd/kernels.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace skyloss {

inline constexpr double kSpeedOfLight = 299792458.0;

struct TxConfig {
    double frequency = 900e6; // Hz
    double altitude = 40.0;   // m
    std::optional<double> x;  // default: region center
    std::optional<double> y;
    double tx_power_dbm = 43.0;
    double rx_sensitivity_dbm = -85.0;

    void validate() const;
    Point3 position(double extent) const;
};

// Excess loss on top of free space: eta_los for clear links, otherwise
// eta_per_blockage per blocking building, capped at eta_cap.
struct NlosModel {
    double eta_los = 0.0;
    double eta_per_blockage = 20.0;
    double eta_cap = 40.0;

    void validate() const;
    double excess_db(std::size_t blockages) const noexcept;
};

struct PathLossMap {
    int n = 0;
    double altitude = 0.0;
    std::vector<double> values;       // dB, row-major; NaN for indoor receivers
    std::vector<std::uint8_t> indoor; // copied from the receiver grid
};

// Free-space path loss 20 log10(4 pi d f / c). Throws DomainError for d <= 0 or f <= 0.
double fspl(double distance_m, double frequency_hz);

double distance(const Point3& a, const Point3& b) noexcept;

// Buildings whose extruded box meets the open segment tx -> rx in its
// interior. A segment that only grazes a face or roof edge is not blocked.
std::vector<Building> los_blockages(const Point3& tx, const Point3& rx, const Scene& scene);

// Precomputed box arrays for repeated blockage queries against one scene.
class BlockageIndex {
public:
    explicit BlockageIndex(const Scene& scene);

    std::size_t count(const Point3& tx, const Point3& rx) const;

private:
    simd::BoxSoA boxes_;
};

PathLossMap simulate(const Scene& scene, const ReceiverGrid& grid, const TxConfig& tx, const NlosModel& nlos);

// One map per altitude (strictly increasing); the rest of tx_base is shared.
std::vector<PathLossMap> batch_simulate(const Scene& scene, const ReceiverGrid& grid, std::span<const double> altitudes,
                                        const TxConfig& tx_base, const NlosModel& nlos);

// CSV "i,j,x,y,indoor,pl_db", row-major, dB with 4 decimals (empty for indoor).
std::string path_loss_csv(const PathLossMap& map, const ReceiverGrid& grid);
void save_path_loss_csv(const PathLossMap& map, const ReceiverGrid& grid, const std::filesystem::path& path);

} // namespace skyloss
