// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace skyloss::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

// Axis-aligned boxes [x_min,x_max] x [y_min,y_max] x [0,z_max], structure of arrays.
struct BoxSoA {
    std::vector<double> x_min, y_min, x_max, y_max, z_max;

    std::size_t size() const noexcept { return x_min.size(); }
    void reserve(std::size_t n);
    void push_back(double x0, double y0, double x1, double y1, double top);
};

// Segment origin + direction; the segment is origin + t*dir, t in (0,1).
struct Segment {
    double ox, oy, oz;
    double dx, dy, dz;
};

// Kernel entry points. Every ISA variant computes the same function; the
// element-wise kernels (axpy, segment_box_hits) are bit-identical across
// variants, reductions (dot, sum) may differ in the last bits because the
// summation order changes.
struct KernelTable {
    Isa isa;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // Number of boxes whose open interior meets the open segment; when
    // `hits` is non-null, hits[i] is set to 0/1 per box.
    std::size_t (*segment_box_hits)(const BoxSoA& boxes, const Segment& seg, std::uint8_t* hits);
};

const KernelTable& scalar_kernels();
// Null when the build has no AVX2 variant.
const KernelTable* avx2_kernels();

bool cpu_supports(Isa isa);

// Process-wide selection. Defaults to the best ISA the CPU supports, or to
// the value of SKYLOSS_SIMD ("scalar" / "avx2") when set.
const KernelTable& active();
Isa active_isa();
// Throws ConfigError when the ISA is not available on this CPU/build.
void select_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b)
{
    return active().dot(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    active().axpy(alpha, x.data(), y.data(), x.size());
}

} // namespace skyloss::simd
