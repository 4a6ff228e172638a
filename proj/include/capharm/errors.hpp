// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

namespace capharm {

// Thrown on malformed configuration (bad keys, out-of-range values).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on malformed input data (coefficient files, CSV payloads).
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a numerical routine fails (non-finite solve, bad residual).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace capharm
