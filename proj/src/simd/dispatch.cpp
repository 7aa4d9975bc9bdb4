// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "kernels_impl.hpp"
#include "skyloss/errors.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace skyloss::simd {

void BoxSoA::reserve(std::size_t n)
{
    x_min.reserve(n);
    y_min.reserve(n);
    x_max.reserve(n);
    y_max.reserve(n);
    z_max.reserve(n);
}

void BoxSoA::push_back(double x0, double y0, double x1, double y1, double top)
{
    x_min.push_back(x0);
    y_min.push_back(y0);
    x_max.push_back(x1);
    y_max.push_back(y1);
    z_max.push_back(top);
}

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

const KernelTable& scalar_kernels()
{
    static const KernelTable table{Isa::scalar, detail::dot_scalar, detail::sum_scalar, detail::axpy_scalar,
                                   detail::segment_box_hits_scalar};
    return table;
}

const KernelTable* avx2_kernels()
{
#if defined(SKYLOSS_HAVE_AVX2)
    static const KernelTable table{Isa::avx2, detail::dot_avx2, detail::sum_avx2, detail::axpy_avx2,
                                   detail::segment_box_hits_avx2};
    return &table;
#else
    return nullptr;
#endif
}

bool cpu_supports(Isa isa)
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(SKYLOSS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

namespace {

const KernelTable* table_for(Isa isa)
{
    return isa == Isa::avx2 ? avx2_kernels() : &scalar_kernels();
}

const KernelTable* initial_table()
{
    if (const char* env = std::getenv("SKYLOSS_SIMD")) {
        const std::string v(env);
        if (v == "scalar")
            return &scalar_kernels();
        if (v == "avx2" && cpu_supports(Isa::avx2))
            return avx2_kernels();
    }
    if (cpu_supports(Isa::avx2))
        return avx2_kernels();
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& current()
{
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

} // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Isa active_isa() { return active().isa; }

void select_isa(Isa isa)
{
    const KernelTable* t = table_for(isa);
    if (!t || !cpu_supports(isa))
        throw ConfigError("SIMD variant '" + std::string(isa_name(isa)) + "' is not available");
    current().store(t, std::memory_order_relaxed);
}

} // namespace skyloss::simd
