// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "kernels_impl.hpp"

#include <algorithm>

namespace skyloss::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

double sum_scalar(const double* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

bool segment_hits_box(const Segment& s, double inv_dx, double inv_dy, double inv_dz, double x0, double y0,
                      double x1, double y1, double top)
{
    double t_enter = 0.0;
    double t_exit = 1.0;

    // Zero direction: the segment must lie strictly inside the open slab.
    if (s.dx == 0.0) {
        if (!(x0 < s.ox && s.ox < x1))
            return false;
    } else {
        const double ta = (x0 - s.ox) * inv_dx;
        const double tb = (x1 - s.ox) * inv_dx;
        t_enter = std::max(t_enter, std::min(ta, tb));
        t_exit = std::min(t_exit, std::max(ta, tb));
    }
    if (s.dy == 0.0) {
        if (!(y0 < s.oy && s.oy < y1))
            return false;
    } else {
        const double ta = (y0 - s.oy) * inv_dy;
        const double tb = (y1 - s.oy) * inv_dy;
        t_enter = std::max(t_enter, std::min(ta, tb));
        t_exit = std::min(t_exit, std::max(ta, tb));
    }
    if (s.dz == 0.0) {
        if (!(0.0 < s.oz && s.oz < top))
            return false;
    } else {
        const double ta = (0.0 - s.oz) * inv_dz;
        const double tb = (top - s.oz) * inv_dz;
        t_enter = std::max(t_enter, std::min(ta, tb));
        t_exit = std::min(t_exit, std::max(ta, tb));
    }
    return t_enter < t_exit;
}

std::size_t segment_box_hits_scalar(const BoxSoA& b, const Segment& s, std::uint8_t* hits)
{
    const double inv_dx = 1.0 / s.dx;
    const double inv_dy = 1.0 / s.dy;
    const double inv_dz = 1.0 / s.dz;
    std::size_t count = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const bool hit =
            segment_hits_box(s, inv_dx, inv_dy, inv_dz, b.x_min[i], b.y_min[i], b.x_max[i], b.y_max[i], b.z_max[i]);
        count += hit ? 1 : 0;
        if (hits)
            hits[i] = hit ? 1 : 0;
    }
    return count;
}

} // namespace skyloss::simd::detail
