#pragma once

#include <stdexcept>
#include <string>

namespace fplsr {

// Thrown when a computation breaks down numerically (singular system,
// non-PSD matrix, smoothing failure). Distinct from std::invalid_argument /
// std::domain_error, which signal bad inputs; the CLI maps the two families
// to different exit codes.
class numerical_error : public std::runtime_error {
  public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fplsr
