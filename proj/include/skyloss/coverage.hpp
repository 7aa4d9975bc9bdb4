// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/histogram.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace skyloss {

inline const std::vector<double> kDefaultThresholdsDb{116.0, 119.0, 122.0, 125.0, 128.0};

// Mass of the bins whose center lies strictly below the threshold.
double coverage(const PathLossDistribution& dist, double threshold_db);

struct AltitudeChoice {
    double altitude = 0.0;
    double coverage = 0.0;
    std::size_t block = 0;
};

// Block with the largest coverage; ties go to the lowest altitude.
AltitudeChoice optimal_altitude(const MultiAltitudeTarget& target, double threshold_db);

struct CoverageTable {
    std::vector<double> altitudes;
    std::vector<double> thresholds;
    std::vector<std::vector<double>> coverage; // [altitude][threshold]
    std::vector<std::size_t> argmax;           // best altitude index per threshold
};

CoverageTable coverage_table(const MultiAltitudeTarget& target, std::span<const double> thresholds);

struct CoverageComparison {
    CoverageTable truth;
    CoverageTable pred;
    std::vector<bool> agree; // per threshold: predicted argmax == true argmax
    // Per threshold, true coverage at the true optimum minus true coverage at
    // the predicted optimum (0 where they agree).
    std::vector<double> coverage_gap;
    double max_gap = 0.0;
};

// Throws ConsistencyError when the altitude sets differ.
CoverageComparison compare_coverage(const MultiAltitudeTarget& truth, const MultiAltitudeTarget& pred,
                                    std::span<const double> thresholds);

// CSV "altitude_m,threshold_db,coverage_true,coverage_pred,is_argmax_true,is_argmax_pred".
// Either side may be absent; its columns are then left empty.
std::string coverage_report_csv(const CoverageTable* truth, const CoverageTable* pred);

} // namespace skyloss
