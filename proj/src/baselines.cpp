// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/baselines.hpp"

#include "skyloss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skyloss {

HataEnv parse_hata_env(std::string_view name)
{
    if (name == "urban-small")
        return HataEnv::urban_small;
    if (name == "urban-large")
        return HataEnv::urban_large;
    if (name == "suburban")
        return HataEnv::suburban;
    if (name == "open")
        return HataEnv::open;
    throw ConfigError("unknown Hata environment '" + std::string(name) + "'");
}

std::string_view hata_env_name(HataEnv env)
{
    switch (env) {
    case HataEnv::urban_small:
        return "urban-small";
    case HataEnv::urban_large:
        return "urban-large";
    case HataEnv::suburban:
        return "suburban";
    case HataEnv::open:
        return "open";
    }
    return "unknown";
}

HataResult okumura_hata(double f, double hb, double hm, double d, HataEnv env)
{
    if (!(f >= 150.0 && f <= 1500.0))
        throw DomainError("okumura_hata: frequency outside [150, 1500] MHz");
    if (!(hm >= 1.0 && hm <= 10.0))
        throw DomainError("okumura_hata: mobile height outside [1, 10] m");
    if (!(d > 0.0))
        throw DomainError("okumura_hata: distance must be positive");

    HataResult r;
    const double hb_eff = std::clamp(hb, 30.0, 200.0);
    r.hb_clamped = hb_eff != hb;

    const double lf = std::log10(f);
    double a_hm;
    if (env == HataEnv::urban_large) {
        a_hm = f < 300.0 ? 8.29 * std::pow(std::log10(1.54 * hm), 2) - 1.1
                         : 3.2 * std::pow(std::log10(11.75 * hm), 2) - 4.97;
    } else {
        a_hm = (1.1 * lf - 0.7) * hm - (1.56 * lf - 0.8);
    }
    const double lhb = std::log10(hb_eff);
    double loss = 69.55 + 26.16 * lf - 13.82 * lhb - a_hm + (44.9 - 6.55 * lhb) * std::log10(d);

    if (env == HataEnv::suburban)
        loss += -2.0 * std::pow(std::log10(f / 28.0), 2) - 5.4;
    else if (env == HataEnv::open)
        loss += -4.78 * lf * lf + 18.33 * lf - 40.94;

    r.loss_db = loss;
    return r;
}

PathLossDistribution baseline_distribution(const ReceiverGrid& grid, const TxConfig& tx, const BaselineModel& model)
{
    tx.validate();
    const Point3 source = tx.position(grid.extent);
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.indoor[k])
            continue;
        const Point3& rx = grid.positions[k];
        if (model.kind == BaselineKind::free_space) {
            values[k] = fspl(distance(source, rx), tx.frequency);
        } else {
            const double horizontal_km = std::hypot(source.x - rx.x, source.y - rx.y) / 1000.0;
            values[k] = okumura_hata(tx.frequency / 1e6, tx.altitude, grid.rx_height,
                                     std::max(horizontal_km, kHataMinDistanceKm), model.env)
                            .loss_db;
        }
    }
    return quantize_values(values, grid.indoor);
}

double p_los(double elevation_deg, double a, double b)
{
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0))
        throw DomainError("p_los: elevation must lie in (0, 90] degrees");
    if (!(a > 0.0 && b > 0.0))
        throw DomainError("p_los: a and b must be positive");
    return 1.0 / (1.0 + a * std::exp(-b * (elevation_deg - a)));
}

} // namespace skyloss
