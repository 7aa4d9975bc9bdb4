// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/coverage.hpp"

#include "skyloss/errors.hpp"
#include "skyloss/io.hpp"

#include <algorithm>
#include <sstream>

namespace skyloss {

double coverage(const PathLossDistribution& dist, double threshold_db)
{
    double c = 0.0;
    for (int k = 0; k < kBins && bin_center(k) < threshold_db; ++k)
        c += dist.bins[k];
    return c;
}

AltitudeChoice optimal_altitude(const MultiAltitudeTarget& target, double threshold_db)
{
    if (target.k() == 0)
        throw ConsistencyError("optimal_altitude: empty target");
    AltitudeChoice best{target.altitudes[0], coverage(target.blocks[0], threshold_db), 0};
    for (std::size_t b = 1; b < target.k(); ++b) {
        const double c = coverage(target.blocks[b], threshold_db);
        if (c > best.coverage)
            best = {target.altitudes[b], c, b};
    }
    return best;
}

CoverageTable coverage_table(const MultiAltitudeTarget& target, std::span<const double> thresholds)
{
    CoverageTable t;
    t.altitudes = target.altitudes;
    t.thresholds.assign(thresholds.begin(), thresholds.end());
    t.coverage.assign(target.k(), std::vector<double>(thresholds.size(), 0.0));
    for (std::size_t b = 0; b < target.k(); ++b)
        for (std::size_t j = 0; j < thresholds.size(); ++j)
            t.coverage[b][j] = coverage(target.blocks[b], thresholds[j]);
    for (double th : thresholds)
        t.argmax.push_back(optimal_altitude(target, th).block);
    return t;
}

CoverageComparison compare_coverage(const MultiAltitudeTarget& truth, const MultiAltitudeTarget& pred,
                                    std::span<const double> thresholds)
{
    if (truth.altitudes != pred.altitudes)
        throw ConsistencyError("compare_coverage: altitude sets differ");
    CoverageComparison c;
    c.truth = coverage_table(truth, thresholds);
    c.pred = coverage_table(pred, thresholds);
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        const std::size_t bt = c.truth.argmax[j];
        const std::size_t bp = c.pred.argmax[j];
        c.agree.push_back(bt == bp);
        const double gap = c.truth.coverage[bt][j] - c.truth.coverage[bp][j];
        c.coverage_gap.push_back(gap);
        c.max_gap = std::max(c.max_gap, gap);
    }
    return c;
}

std::string coverage_report_csv(const CoverageTable* truth, const CoverageTable* pred)
{
    const CoverageTable* ref = truth ? truth : pred;
    if (!ref)
        throw ConsistencyError("coverage report needs at least one table");
    if (truth && pred && (truth->altitudes != pred->altitudes || truth->thresholds != pred->thresholds))
        throw ConsistencyError("coverage report tables do not match");

    std::ostringstream out;
    out << "altitude_m,threshold_db,coverage_true,coverage_pred,is_argmax_true,is_argmax_pred\n";
    for (std::size_t b = 0; b < ref->altitudes.size(); ++b) {
        for (std::size_t j = 0; j < ref->thresholds.size(); ++j) {
            out << io::shortest(ref->altitudes[b]) << ',' << io::shortest(ref->thresholds[j]) << ',';
            if (truth)
                out << io::significant(truth->coverage[b][j], 9);
            out << ',';
            if (pred)
                out << io::significant(pred->coverage[b][j], 9);
            out << ',';
            if (truth)
                out << (truth->argmax[j] == b ? 1 : 0);
            out << ',';
            if (pred)
                out << (pred->argmax[j] == b ? 1 : 0);
            out << '\n';
        }
    }
    return out.str();
}

} // namespace skyloss
