#ifndef NULLAG_ERRORS_HPP
#define NULLAG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nullag {

// invalid-argument and domain-error map onto the std exceptions;
// the rest are project-specific failure modes.

struct unsupported_configuration : std::runtime_error {
  explicit unsupported_configuration(const std::string& what)
      : std::runtime_error("unsupported configuration: " + what) {}
};

struct integration_budget_exceeded : std::runtime_error {
  explicit integration_budget_exceeded(const std::string& what)
      : std::runtime_error("integration budget exceeded: " + what) {}
};

struct integrand_error : std::runtime_error {
  explicit integrand_error(const std::string& what)
      : std::runtime_error("integrand error: " + what) {}
};

struct tangency_violation : std::runtime_error {
  explicit tangency_violation(const std::string& what)
      : std::runtime_error("tangency violation: " + what) {}
};

struct chart_singularity : std::runtime_error {
  explicit chart_singularity(const std::string& what)
      : std::runtime_error("chart singularity: " + what) {}
};

struct needs_more_samples : std::runtime_error {
  explicit needs_more_samples(const std::string& what)
      : std::runtime_error("needs more samples: " + what) {}
};

}  // namespace nullag

#endif
