#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace modrec {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Invalid parameters, dimensions or configuration. Maps to CLI exit code 1.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Divergence, non-finite values or I/O failure at run time. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

inline void require_same_length(Eigen::Index a, Eigen::Index b, const char* context) {
  if (a != b) {
    throw ConfigError(std::string(context) + ": length mismatch (" + std::to_string(a) + " vs " +
                      std::to_string(b) + ")");
  }
}

}  // namespace detail
}  // namespace modrec
