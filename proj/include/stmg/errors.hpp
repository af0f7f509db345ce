#pragma once

#include <stdexcept>
#include <string>

namespace stmg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A factorization hit a pivot below the relative singularity threshold.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

/// The eigenvalue iteration exceeded its iteration cap.
class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Assembly was asked for a combination of options that cannot hold together.
class InconsistentData : public Error {
 public:
  using Error::Error;
};

/// A coarsened direction has an odd number of cells or slabs.
class OddDimension : public Error {
 public:
  using Error::Error;
};

/// A Fourier symbol that has to be inverted is numerically singular.
class SingularSymbol : public Error {
 public:
  using Error::Error;
};

/// A frequency belongs to the excluded set of the two-grid analysis.
class ExcludedFrequency : public SingularSymbol {
 public:
  using SingularSymbol::SingularSymbol;
};

/// A residual ratio exceeded the divergence guard during an iterative solve.
class Diverged : public Error {
 public:
  Diverged(int iteration, double ratio)
      : Error("iteration diverged at step " + std::to_string(iteration) +
              " (residual ratio " + std::to_string(ratio) + ")"),
        iteration_(iteration),
        ratio_(ratio) {}

  int iteration() const noexcept { return iteration_; }
  double ratio() const noexcept { return ratio_; }

 private:
  int iteration_;
  double ratio_;
};

}  // namespace stmg
