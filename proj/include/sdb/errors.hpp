// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sdb {

// Operand shapes do not conform for an op; message names the op.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A forward op produced a non-finite value.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller violated an API precondition (key mismatch, non-scalar loss, ...).
struct ContractError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration value (zero counts, rho outside [0,1], ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (t outside [0,1],
// evaluation at a schedule singularity, ...).
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// SDE integration produced a non-finite state; carries the failing step.
struct DivergenceError : std::runtime_error {
    int step;
    DivergenceError(const std::string& what, int step_index)
        : std::runtime_error(what), step(step_index) {}
};

// Training loss became non-finite; carries the failing iteration.
struct TrainingError : std::runtime_error {
    int iteration;
    TrainingError(const std::string& what, int iter)
        : std::runtime_error(what), iteration(iter) {}
};

// A sanity threshold was not met (e.g. the content classifier cannot reach
// its accuracy floor on clean data, signalling a degenerate generator).
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sdb
