#pragma once

#include "numprag/core.hpp"

namespace numprag {

inline void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("calibration exponent must lie in [0, 1]");
}

/// Power-law calibration p -> p^lambda, renormalized. Zero cells stay zero
/// for every lambda, including lambda = 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> calibrate_weights(const Eigen::MatrixBase<Derived>& probs,
                                                                              double lambda) {
  using Scalar = typename Derived::Scalar;
  check_lambda(lambda);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = probs;
  if (lambda == 1.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = out(i) > Scalar(0) ? std::pow(out(i), Scalar(lambda)) : Scalar(0);
  }
  const Scalar total = out.sum();
  if (!(total > Scalar(0))) throw NormalizationError("calibrated distribution has no mass");
  return out / total;
}

template <typename Outcome, typename Scalar>
Dist<Outcome, Scalar> calibrate(const Dist<Outcome, Scalar>& d, double lambda) {
  check_lambda(lambda);
  if (lambda == 1.0) return d;
  return Dist<Outcome, Scalar>(d.support(), calibrate_weights(d.probs(), lambda));
}

}  // namespace numprag
