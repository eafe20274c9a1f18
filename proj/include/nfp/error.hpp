#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nfp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand lengths or shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter combination is outside what the construction supports.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Input is degenerate (e.g. all-zero) where a nonzero scale is required.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A Fourier-domain block of a lifted operator is numerically singular.
class IllPosedOperatorError : public Error {
 public:
  IllPosedOperatorError(std::size_t block, double sigma_min)
      : Error("lifted operator is singular in Fourier block " +
              std::to_string(block) +
              " (sigma_min = " + std::to_string(sigma_min) + ")"),
        block_(block),
        sigma_min_(sigma_min) {}

  std::size_t block() const { return block_; }
  double sigma_min() const { return sigma_min_; }

 private:
  std::size_t block_;
  double sigma_min_;
};

/// An iterative eigensolver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual = " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The synchronization graph is disconnected, so relative phases do not
/// determine a single global phase class.
class SynchronizationError : public Error {
 public:
  using Error::Error;
};

/// Gradient descent produced a non-finite loss.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::size_t iteration)
      : Error("non-finite loss at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t iteration_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nfp
