// SPDX-License-Identifier: Apache-2.0
//
// skyloss - UAV base-station altitude selection from top-down region images
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace skyloss {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a model formula.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Mismatched shapes, grids, altitude sets or malformed targets.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input with nothing to measure, e.g. a path-loss map with every receiver indoors.
class DegenerateInputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File system or file format problems (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training diverged (CLI exit code 4).
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, int epoch)
        : std::runtime_error(what + " (epoch " + std::to_string(epoch) + ")"), epoch_(epoch) {}

    int epoch() const noexcept { return epoch_; }

private:
    int epoch_;
};

} // namespace skyloss
