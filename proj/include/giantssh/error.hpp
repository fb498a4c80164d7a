#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace giantssh {

/// Invalid geometry, schedule or scenario description. Carries every problem
/// found, not just the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> messages);
  explicit ConfigError(const std::string& message)
      : ConfigError(std::vector<std::string>{message}) {}

  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// A numerical monitor tripped (non-Hermitian input, norm drift, no convergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Driven preparation did not reach the requested fidelity.
class PreparationError : public std::runtime_error {
 public:
  PreparationError(const std::string& message, double peak_fidelity, double peak_time)
      : std::runtime_error(message), peak_fidelity_(peak_fidelity), peak_time_(peak_time) {}

  double peak_fidelity() const noexcept { return peak_fidelity_; }
  double peak_time() const noexcept { return peak_time_; }

 private:
  double peak_fidelity_;
  double peak_time_;
};

}  // namespace giantssh
