#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace brp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Error raised when the generalized eigenproblem of E^{-1}A has a
/// near-degenerate spectrum and the state cannot be treated as strictly
/// hyperbolic.
class NonHyperbolicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural rank assumption failed (e.g. the coupling block lost rank).
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A matrix-pencil root acquired an imaginary part beyond tolerance.
class ComplexRootError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested wave strength or data amplitude exceeds the configured bound.
class AmplitudeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Newton iteration failed to converge.
class NewtonError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fixed-point iteration failed to converge.
class FixedPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The characteristic field is not linearly degenerate at this state.
class NotLinearlyDegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime check of one of the structural hypotheses failed.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PDE time step violated its stability bound or produced NaNs.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace brp
