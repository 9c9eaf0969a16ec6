#pragma once

#include <stdexcept>
#include <string>

namespace axistable {

// Numerical failure: quadrature non-convergence, solver stagnation, and the
// like. Carries the last two estimates when a refinement pair disagreed.
class numeric_error : public std::runtime_error {
 public:
  explicit numeric_error(const std::string& what, double previous = 0.0,
                         double current = 0.0)
      : std::runtime_error(what), previous_estimate(previous),
        current_estimate(current) {}
  double previous_estimate;
  double current_estimate;
};

// A stated hypothesis of the theory is not met, so the requested computation
// refuses to run (CLI exit code 2 rather than 1).
class gate_error : public std::runtime_error {
 public:
  explicit gate_error(const std::string& hypothesis)
      : std::runtime_error(hypothesis) {}
};

// Bad configuration or arguments.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace axistable
