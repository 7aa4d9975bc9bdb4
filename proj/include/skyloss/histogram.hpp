// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/propagation.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace skyloss {

inline constexpr int kBins = 26;
inline constexpr double kFirstCenterDb = 55.0;
inline constexpr double kBinWidthDb = 3.0;

constexpr double bin_center(int k) noexcept { return kFirstCenterDb + kBinWidthDb * k; }
// Lower edge of bin k; bin k is [lower_edge(k), lower_edge(k+1)).
constexpr double lower_edge(int k) noexcept { return bin_center(k) - 0.5 * kBinWidthDb; }

// Bin index with out-of-range values clamped to the edge bins.
int bin_index(double pl_db) noexcept;

// Normalized 26-bin path-loss histogram.
struct PathLossDistribution {
    std::array<double, kBins> bins{};

    double total() const noexcept;
    friend bool operator==(const PathLossDistribution&, const PathLossDistribution&) = default;
};

// Histogram of the outdoor entries of `values`. Throws DegenerateInputError
// when there are none and DomainError on non-finite outdoor values.
PathLossDistribution quantize_values(std::span<const double> values, std::span<const std::uint8_t> indoor);
PathLossDistribution quantize(const PathLossMap& map);

// K per-altitude distributions, ascending altitude; flattened length 26K.
struct MultiAltitudeTarget {
    std::vector<double> altitudes;
    std::vector<PathLossDistribution> blocks;

    std::size_t k() const noexcept { return blocks.size(); }
    std::vector<double> flatten() const;
    static MultiAltitudeTarget unflatten(std::span<const double> flat, std::span<const double> altitudes);

    friend bool operator==(const MultiAltitudeTarget&, const MultiAltitudeTarget&) = default;
};

// Throws ConsistencyError when grids/indoor masks differ or altitudes are not
// strictly increasing in the given order.
MultiAltitudeTarget concat_target(std::span<const PathLossMap> maps);

// Mean over samples x 26 bins of the squared difference, per altitude block.
std::vector<double> mse_per_altitude(std::span<const MultiAltitudeTarget> truth,
                                     std::span<const MultiAltitudeTarget> pred);

// Per-bin variance around the per-bin sample mean, averaged over bins, per
// altitude block: the MSE of the constant per-bin-mean predictor.
std::vector<double> variance_per_altitude(std::span<const MultiAltitudeTarget> truth);

// Targets CSV: one sample per row, 26K columns, 9 significant digits.
std::string targets_csv(std::span<const MultiAltitudeTarget> targets);
void save_targets_csv(std::span<const MultiAltitudeTarget> targets, const std::filesystem::path& path);
std::vector<MultiAltitudeTarget> load_targets_csv(const std::filesystem::path& path, std::span<const double> altitudes);

} // namespace skyloss
