// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#include "skyloss/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return skyloss::cli::run(argc, argv, std::cout, std::cerr); }
