// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ckm {

// Bad inputs: malformed or inconsistent files, out-of-range references,
// invalid configuration. CLI maps these to exit code 2.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ckm
