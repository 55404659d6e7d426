#pragma once

#include "goq/numerics.hpp"

#include <vector>

namespace goq {

/// Normalised point density on an interval with its CDF.
class DensityProfile {
 public:
  /// Normalises a nonnegative shape over [lo, hi]; the CDF is tabulated on
  /// `panels` equal panels by adaptive quadrature.
  static DensityProfile from_shape(double lo, double hi, ScalarFn shape, int panels = 512);
  static DensityProfile uniform(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Normalised density value.
  double operator()(double g) const;
  double cdf(double g) const;
  /// Inverse CDF by bisection to 1e-10 (monotone).
  double quantile(double u) const;
  /// C such that density = C * shape.
  double normalization() const { return norm_; }
  /// Integral of the raw shape, i.e. 1 / C.
  double shape_mass() const { return 1.0 / norm_; }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  double norm_ = 1.0;
  ScalarFn shape_;
  std::vector<double> cum_;  // cumulative normalised mass at panel edges
};

}  // namespace goq
