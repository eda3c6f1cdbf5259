#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tanglescope {

/// Raised when a configuration file or document fails validation. Carries
/// every issue found, not just the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid configuration";
    for (const auto& issue : issues) {
      out += "\n  ";
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

/// Raised when a numerical routine cannot deliver its contract
/// (non-convergence, cross-check mismatch, unusable fit).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tanglescope
