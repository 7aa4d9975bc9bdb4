// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/histogram.hpp"

#include <string_view>

namespace skyloss {

enum class HataEnv { urban_small, urban_large, suburban, open };

HataEnv parse_hata_env(std::string_view name);
std::string_view hata_env_name(HataEnv env);

struct HataResult {
    double loss_db = 0.0;
    bool hb_clamped = false; // base height was forced into [30, 200] m
};

// Okumura-Hata median path loss. frequency in MHz [150, 1500], hm in [1, 10] m,
// distance in km (> 0). Out-of-range base heights are clamped and flagged.
HataResult okumura_hata(double frequency_mhz, double hb_m, double hm_m, double distance_km, HataEnv env);

enum class BaselineKind { free_space, okumura_hata };

struct BaselineModel {
    BaselineKind kind = BaselineKind::free_space;
    HataEnv env = HataEnv::urban_small;
};

// Hata distances below this are raised to it; the receiver under the
// transmitter would otherwise have log10(0).
inline constexpr double kHataMinDistanceKm = 1e-3;

// Distribution over the outdoor receivers of `grid` for the analytic model.
// Free space uses 3D distance; Hata uses horizontal distance with hb = altitude.
PathLossDistribution baseline_distribution(const ReceiverGrid& grid, const TxConfig& tx, const BaselineModel& model);

// LoS probability sigmoid 1 / (1 + a exp(-b (elevation - a))), elevation in
// degrees within (0, 90], a, b > 0.
double p_los(double elevation_deg, double a, double b);

} // namespace skyloss
