#pragma once

#include <stdexcept>
#include <string>

namespace adabo {

// Bad inputs to library operations (out-of-range points, non-finite targets).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Bad run configuration (unknown objective, inconsistent pool sizes, IO paths).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A surrogate could not be fitted; callers may fall back to random proposals.
struct FitError : std::runtime_error {
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// A single objective evaluation failed (subprocess error, timeout, bad reply).
struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace adabo
