// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <iosfwd>

namespace skyloss::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kNumeric = 4 };

// Entry point of the `skyloss` executable. Results go to `out`, progress and
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace skyloss::cli
