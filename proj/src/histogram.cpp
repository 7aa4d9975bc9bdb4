// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/histogram.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace skyloss {

int bin_index(double pl_db) noexcept
{
    if (pl_db < lower_edge(1))
        return 0;
    if (pl_db >= lower_edge(kBins - 1))
        return kBins - 1;
    // The division can round across an edge; settle against the exact edges.
    int k = static_cast<int>(std::floor((pl_db - lower_edge(0)) / kBinWidthDb));
    k = std::clamp(k, 1, kBins - 2);
    while (k > 1 && pl_db < lower_edge(k))
        --k;
    while (k < kBins - 2 && pl_db >= lower_edge(k + 1))
        ++k;
    return k;
}

double PathLossDistribution::total() const noexcept { return std::accumulate(bins.begin(), bins.end(), 0.0); }

PathLossDistribution quantize_values(std::span<const double> values, std::span<const std::uint8_t> indoor)
{
    if (values.size() != indoor.size())
        throw ConsistencyError("quantize: value and mask lengths differ");
    std::array<std::size_t, kBins> counts{};
    std::size_t outdoor = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (indoor[i])
            continue;
        if (!std::isfinite(values[i]))
            throw DomainError("quantize: non-finite path loss at outdoor receiver " + std::to_string(i));
        ++counts[static_cast<std::size_t>(bin_index(values[i]))];
        ++outdoor;
    }
    if (outdoor == 0)
        throw DegenerateInputError("quantize: every receiver is indoors");
    PathLossDistribution d;
    for (int k = 0; k < kBins; ++k)
        d.bins[k] = static_cast<double>(counts[k]) / static_cast<double>(outdoor);
    return d;
}

PathLossDistribution quantize(const PathLossMap& map) { return quantize_values(map.values, map.indoor); }

std::vector<double> MultiAltitudeTarget::flatten() const
{
    std::vector<double> flat;
    flat.reserve(blocks.size() * kBins);
    for (const auto& b : blocks)
        flat.insert(flat.end(), b.bins.begin(), b.bins.end());
    return flat;
}

MultiAltitudeTarget MultiAltitudeTarget::unflatten(std::span<const double> flat, std::span<const double> altitudes)
{
    if (flat.size() != altitudes.size() * kBins)
        throw ConsistencyError("target length " + std::to_string(flat.size()) + " does not match " +
                               std::to_string(altitudes.size()) + " altitudes");
    MultiAltitudeTarget t;
    t.altitudes.assign(altitudes.begin(), altitudes.end());
    t.blocks.resize(altitudes.size());
    for (std::size_t b = 0; b < altitudes.size(); ++b)
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(b * kBins), kBins, t.blocks[b].bins.begin());
    return t;
}

MultiAltitudeTarget concat_target(std::span<const PathLossMap> maps)
{
    if (maps.empty())
        throw ConsistencyError("concat_target needs at least one map");
    MultiAltitudeTarget t;
    for (std::size_t b = 0; b < maps.size(); ++b) {
        const PathLossMap& m = maps[b];
        if (m.n != maps[0].n || m.indoor != maps[0].indoor)
            throw ConsistencyError("concat_target: maps do not share a receiver grid");
        if (b > 0 && !(m.altitude > maps[b - 1].altitude))
            throw ConsistencyError("concat_target: altitudes must be strictly increasing");
        t.altitudes.push_back(m.altitude);
        t.blocks.push_back(quantize(m));
    }
    return t;
}

namespace {

void check_pairing(std::span<const MultiAltitudeTarget> truth, std::span<const MultiAltitudeTarget> pred)
{
    if (truth.size() != pred.size())
        throw ConsistencyError("sample counts differ");
    if (truth.empty())
        throw ConsistencyError("no samples");
    for (std::size_t s = 0; s < truth.size(); ++s)
        if (truth[s].k() != truth[0].k() || pred[s].k() != truth[0].k())
            throw ConsistencyError("altitude counts differ");
}

} // namespace

std::vector<double> mse_per_altitude(std::span<const MultiAltitudeTarget> truth,
                                     std::span<const MultiAltitudeTarget> pred)
{
    check_pairing(truth, pred);
    const std::size_t k = truth[0].k();
    std::vector<double> mse(k, 0.0);
    for (std::size_t b = 0; b < k; ++b) {
        double acc = 0.0;
        for (std::size_t s = 0; s < truth.size(); ++s)
            for (int i = 0; i < kBins; ++i) {
                const double d = truth[s].blocks[b].bins[i] - pred[s].blocks[b].bins[i];
                acc += d * d;
            }
        mse[b] = acc / static_cast<double>(truth.size() * kBins);
    }
    return mse;
}

std::vector<double> variance_per_altitude(std::span<const MultiAltitudeTarget> truth)
{
    if (truth.empty())
        throw ConsistencyError("no samples");
    MultiAltitudeTarget mean = truth[0];
    for (auto& blk : mean.blocks)
        blk.bins.fill(0.0);
    for (const auto& t : truth) {
        if (t.k() != mean.k())
            throw ConsistencyError("altitude counts differ");
        for (std::size_t b = 0; b < t.k(); ++b)
            for (int i = 0; i < kBins; ++i)
                mean.blocks[b].bins[i] += t.blocks[b].bins[i];
    }
    for (auto& blk : mean.blocks)
        for (double& v : blk.bins)
            v /= static_cast<double>(truth.size());
    const std::vector<MultiAltitudeTarget> pred(truth.size(), mean);
    return mse_per_altitude(truth, pred);
}

std::string targets_csv(std::span<const MultiAltitudeTarget> targets)
{
    std::ostringstream out;
    for (const auto& t : targets) {
        const auto flat = t.flatten();
        for (std::size_t i = 0; i < flat.size(); ++i) {
            if (i)
                out << ',';
            out << io::significant(flat[i], 9);
        }
        out << '\n';
    }
    return out.str();
}

void save_targets_csv(std::span<const MultiAltitudeTarget> targets, const std::filesystem::path& path)
{
    io::write_text(path, targets_csv(targets));
}

std::vector<MultiAltitudeTarget> load_targets_csv(const std::filesystem::path& path, std::span<const double> altitudes)
{
    std::istringstream in(io::read_text(path));
    std::vector<MultiAltitudeTarget> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            out.push_back(MultiAltitudeTarget::unflatten(io::parse_number_list(line, "targets.csv"), altitudes));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ": " + e.what());
        }
    }
    return out;
}

} // namespace skyloss
