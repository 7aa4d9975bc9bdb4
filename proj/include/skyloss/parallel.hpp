// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <functional>

namespace skyloss {

// Worker cap used by parallel_for. 0 means "not set": the SKYLOSS_THREADS
// environment variable is consulted, then hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Runs body(i) for i in [0, n). Iterations are split into contiguous chunks
// and must only write to per-index outputs; results are therefore identical
// for every thread count. Exceptions are rethrown on the calling thread
// (the one from the lowest failing chunk).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace skyloss
