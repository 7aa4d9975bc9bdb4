// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include "skyloss/simd/kernels.hpp"

namespace skyloss::simd::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
double sum_scalar(const double* a, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
std::size_t segment_box_hits_scalar(const BoxSoA& b, const Segment& s, std::uint8_t* hits);

// Slab test for one box. Shared by the vector kernels for their tails.
bool segment_hits_box(const Segment& s, double inv_dx, double inv_dy, double inv_dz, double x0, double y0,
                      double x1, double y1, double top);

#if defined(SKYLOSS_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
double sum_avx2(const double* a, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
std::size_t segment_box_hits_avx2(const BoxSoA& b, const Segment& s, std::uint8_t* hits);
#endif

} // namespace skyloss::simd::detail
