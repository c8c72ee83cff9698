#pragma once

#include <stdexcept>
#include <string>

namespace satrisk {

/// Invalid model, policy, flag, or file content. The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
  public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: solver residual out of bounds, variance more negative
/// than round-off allows. The CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
  public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace satrisk
